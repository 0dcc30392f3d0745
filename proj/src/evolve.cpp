#include "gene/evolve.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "code_meta.hpp"

namespace gene {

std::vector<std::uint8_t> default_base_words() {
  return {code_of(Op::If),   code_of(Op::Const), code_of(Op::Dup), code_of(Op::Drop),
          code_of(Op::Swap), code_of(Op::Over),  code_of(Op::Rot), code_of(Op::RotDown),
          code_of(Op::Add),  code_of(Op::Sub),   code_of(Op::Mul)};
}

std::vector<std::uint8_t> default_system_words() {
  std::vector<std::uint8_t> base = default_base_words();
  std::vector<std::uint8_t> out;
  for (int c = 1; c < kBuiltinCount; ++c) {
    Op op = static_cast<Op>(c);
    if (op == Op::Pick || op == Op::Roll || op == Op::Zero) continue;
    std::uint8_t code = static_cast<std::uint8_t>(c);
    if (std::find(base.begin(), base.end(), code) == base.end()) out.push_back(code);
  }
  return out;
}

QualityReport genome_quality(const Genome& genome, const TestSuite& suite,
                             const FrequencyModel& model, const ForbiddenPairs& forbidden,
                             std::uint64_t sample_size, int lmin, int lmax,
                             const ExecLimits& limits, std::uint64_t seed, int prior_best) {
  Sampler sampler(model, genome.alphabet, forbidden, genome.dict);
  Executor ex;
  Rng rng(seed);
  GenConfig cfg{lmin, lmax, GenMode::Unigram};
  QualityReport r;
  r.sample_size = sample_size;
  r.max_passed = prior_best;
  const int items = static_cast<int>(suite.items.size());
  for (std::uint64_t i = 0; i < sample_size; ++i) {
    std::optional<Sample> s = sampler.try_sample(rng, cfg);
    if (!s) continue;  // a rejected draw is a zero-pass sample
    if (s->consumed != suite.m || s->produced != suite.n) continue;
    int pass = evaluate_prechecked(ex, s->prog.bytes.data(), s->prog.size(), genome.dict, suite,
                                   limits, /*strict=*/true);
    r.passed_total += static_cast<std::uint64_t>(pass);
    if (pass > r.max_passed) r.max_passed = pass;
    (void)items;
  }
  return r;
}

bool gene_success(const QualityReport& before, const QualityReport& after) {
  if (after.max_passed > before.max_passed) return true;
  if (after.max_passed < before.max_passed) return false;
  // from a dead genome, only actual progress counts as an increase
  if (before.passed_total == 0) return after.passed_total > 0;
  // avg_after >= avg_before * 1.01, compared exactly on the underlying counts.
  unsigned __int128 lhs =
      static_cast<unsigned __int128>(after.passed_total) * 100u * before.sample_size;
  unsigned __int128 rhs =
      static_cast<unsigned __int128>(before.passed_total) * 101u * after.sample_size;
  return lhs >= rhs;
}

std::vector<Chain> extract_candidates(const PartialProgramList& partials,
                                      const std::set<Chain>& unsuccessful, std::size_t k,
                                      const Dictionary& dict) {
  std::map<Chain, std::uint64_t> counts;
  for (const PartialEntry& e : partials.entries()) {
    DecodeResult dec = decode(e.prog, dict);
    if (!dec.ok) continue;
    // instrs includes END last; chains may not span it
    const auto& ins = dec.instrs;
    const std::size_t ni = ins.size() - 1;
    for (std::size_t len = 2; len <= 3; ++len) {
      if (ni < len) continue;
      for (std::size_t i = 0; i + len <= ni; ++i) {
        std::size_t b0 = ins[i].offset;
        std::size_t b1 = ins[i + len - 1].offset + ins[i + len - 1].size;
        Chain c{std::vector<std::uint8_t>(e.prog.bytes.begin() + b0, e.prog.bytes.begin() + b1)};
        ++counts[c];
      }
    }
  }

  std::set<Chain> in_dict;
  for (const Word& w : dict.words()) {
    if (w.builtin()) continue;
    Chain c{std::vector<std::uint8_t>(w.body.bytes.begin(), w.body.bytes.end() - 1)};
    in_dict.insert(std::move(c));
  }

  std::vector<std::pair<Chain, std::uint64_t>> ranked;
  for (auto& [chain, n] : counts) {
    if (unsuccessful.count(chain) || in_dict.count(chain)) continue;
    Program body{chain.bytes};
    body.bytes.push_back(code_of(Op::End));
    StackEffect eff = static_analyze(body, dict);
    if (!eff.valid) continue;  // e.g. a jump that escapes the chain
    ranked.emplace_back(chain, n);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    if (a.first.bytes.size() != b.first.bytes.size())
      return a.first.bytes.size() < b.first.bytes.size();
    return a.first.bytes < b.first.bytes;
  });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<Chain> out;
  out.reserve(ranked.size());
  for (auto& [chain, n] : ranked) out.push_back(std::move(chain));
  return out;
}

namespace {

std::string quality_line(const QualityReport& q) {
  std::ostringstream os;
  os << "# QUALITY max=" << q.max_passed << " avg=" << q.avg() << " sample=" << q.sample_size;
  return os.str();
}

}  // namespace

AdmissibleResult select_admissible(const TestSuite& suite, const Dictionary& dict,
                                   const std::vector<std::uint8_t>& base_words,
                                   const std::vector<std::uint8_t>& system_words,
                                   const ForbiddenPairs& forbidden, const ExecLimits& limits,
                                   const AdmissibleConfig& cfg, Transcript* transcript) {
  AdmissibleResult res;
  res.genome.dict = dict;
  res.genome.alphabet.codes = base_words;
  res.genome.alphabet.const_values = default_const_values();

  const int lmin = cfg.step.l0 + 1;
  const int lmax = std::max(lmin, cfg.step.l1);

  BaseStepConfig step = cfg.step;
  step.seed = derive_seed(cfg.step.seed, 0xadb0);
  BaseStepResult bs =
      base_step(suite, res.genome.dict, res.genome.alphabet, forbidden, limits, step);
  res.partials = bs.partials;
  res.model = bs.model;
  if (bs.found) {
    res.found = bs.found;
    return res;
  }
  res.quality = genome_quality(res.genome, suite, res.model, forbidden, cfg.quality_sample, lmin,
                               lmax, limits, derive_seed(cfg.step.seed, 0xadb1),
                               res.partials.best_pass());
  if (transcript) transcript->line("# base " + quality_line(res.quality));

  int trial_no = 0;
  for (std::uint8_t w : system_words) {
    ++trial_no;
    if (res.genome.alphabet.has(w)) continue;
    Genome trial = res.genome;
    trial.alphabet.codes.push_back(w);

    BaseStepConfig tstep = cfg.step;
    tstep.seed = derive_seed(cfg.step.seed, 0xadc0 + static_cast<std::uint64_t>(trial_no));
    BaseStepResult tbs = base_step(suite, trial.dict, trial.alphabet, forbidden, limits, tstep);
    if (tbs.found) {
      res.genome = std::move(trial);
      res.partials = tbs.partials;
      res.model = tbs.model;
      res.found = tbs.found;
      if (transcript) transcript->line("+WORD " + dict.at(w).name + " (full pass)");
      return res;
    }
    QualityReport tq = genome_quality(trial, suite, tbs.model, forbidden, cfg.quality_sample, lmin,
                                      lmax, limits,
                                      derive_seed(cfg.step.seed, 0xade0 + trial_no),
                                      tbs.partials.best_pass());
    if (gene_success(res.quality, tq)) {
      res.genome = std::move(trial);
      res.partials = tbs.partials;
      res.model = tbs.model;
      res.quality = tq;
      if (transcript) transcript->line("+WORD " + dict.at(w).name + " " + quality_line(tq));
    } else {
      if (transcript) transcript->line("-WORD " + dict.at(w).name + " " + quality_line(tq));
    }
  }
  return res;
}

namespace {

struct AttemptResult {
  std::optional<Program> found;
  Genome genome;
  GeneLists genes;
};

AttemptResult evolve_attempt(const TestSuite& suite, const Dictionary& builtins,
                             const ExecLimits& limits, const EvolveConfig& cfg,
                             std::uint64_t seed, BudgetGate& gate, Transcript& tr) {
  AttemptResult res;
  ForbiddenPairs forbidden = ForbiddenPairs::defaults(builtins);
  const int lmin = cfg.gene_step.l0 + 1;
  const int lmax = std::max(lmin, cfg.gene_step.l1);

  // Step 1: the admissible word list (and the partial programs it leaves).
  PartialProgramList partials{cfg.gene_step.np};
  FrequencyModel model;
  QualityReport quality;
  if (cfg.fixed_alphabet) {
    res.genome.dict = builtins;
    res.genome.alphabet = *cfg.fixed_alphabet;
    BaseStepConfig step = cfg.gene_step;
    step.seed = derive_seed(seed, 0xb000);
    BaseStepResult bs =
        base_step(suite, res.genome.dict, res.genome.alphabet, forbidden, limits, step);
    partials = bs.partials;
    model = bs.model;
    if (bs.found) {
      res.found = bs.found;
      return res;
    }
    quality = genome_quality(res.genome, suite, model, forbidden, cfg.quality_sample, lmin, lmax,
                             limits, derive_seed(seed, 0xb001), partials.best_pass());
    tr.line("# base " + quality_line(quality));
  } else {
    AdmissibleConfig adm = cfg.admissible;
    adm.step.seed = seed;
    AdmissibleResult ar = select_admissible(suite, builtins, default_base_words(),
                                            default_system_words(), forbidden, limits, adm, &tr);
    res.genome = std::move(ar.genome);
    partials = std::move(ar.partials);
    model = std::move(ar.model);
    quality = ar.quality;
    if (ar.found) {
      res.found = ar.found;
      return res;
    }
  }
  {
    std::ostringstream os;
    os << "# ALPHABET";
    for (std::uint8_t c : res.genome.alphabet.codes) os << ' ' << res.genome.dict.at(c).name;
    tr.line(os.str());
  }

  // Steps 2-8: the gene loop.
  res.genes.candidates.clear();
  res.genes.unsuccessful.clear();
  int iteration = 0;
  while (!gate.exhausted()) {
    ++iteration;
    res.genes.candidates = extract_candidates(partials, res.genes.unsuccessful,
                                              cfg.candidate_batch, res.genome.dict);
    if (res.genes.candidates.empty()) break;  // step 4
    Chain chain = res.genes.candidates.front();

    Program body{chain.bytes};
    body.bytes.push_back(code_of(Op::End));
    StackEffect eff = static_analyze(body, res.genome.dict);
    if (!eff.valid) {
      res.genes.unsuccessful.insert(chain);
      continue;
    }
    char name[16];
    std::snprintf(name, sizeof name, "F_%03d", res.genome.dict.next_code());
    std::uint8_t code =
        res.genome.dict.add_word(name, body, eff.consumed, eff.produced, true);
    res.genome.alphabet.codes.push_back(code);
    std::string def = ": " + std::string(name) + " " + disassemble(body, res.genome.dict) + " ;";

    BaseStepConfig step = cfg.gene_step;
    step.seed = derive_seed(seed, 0xc000 + static_cast<std::uint64_t>(iteration));
    BaseStepResult bs =
        base_step(suite, res.genome.dict, res.genome.alphabet, forbidden, limits, step);
    if (bs.found) {
      tr.line("+GENE " + def);
      res.genes.accepted.push_back(name);
      res.found = bs.found;
      return res;
    }
    QualityReport q2 = genome_quality(res.genome, suite, bs.model, forbidden, cfg.quality_sample,
                                      lmin, lmax, limits,
                                      derive_seed(seed, 0xd000 + iteration),
                                      bs.partials.best_pass());
    if (gene_success(quality, q2)) {
      tr.line("+GENE " + def + "  " + quality_line(q2));
      res.genes.accepted.push_back(name);
      partials = std::move(bs.partials);
      model = std::move(bs.model);
      quality = q2;
    } else {
      tr.line("-GENE " + def + "  " + quality_line(q2));
      res.genome.dict.remove_last_word();
      res.genome.alphabet.codes.pop_back();
      res.genes.unsuccessful.insert(chain);
    }
  }
  return res;
}

}  // namespace

EvolveResult evolve(const TestSuite& suite, const Dictionary& builtins, const ExecLimits& limits,
                    const EvolveConfig& cfg) {
  EvolveResult out;
  Transcript tr;
  const int attempts = cfg.retries + 1;
  for (int att = 0; att < attempts; ++att) {
    Budget slice = cfg.total;
    if (slice.max_attempts) slice.max_attempts /= attempts;
    if (slice.max_seconds > 0) slice.max_seconds /= attempts;
    BudgetGate gate(slice);
    std::uint64_t seed = derive_seed(cfg.seed, 0xa77 + static_cast<std::uint64_t>(att));
    tr.line("# attempt " + std::to_string(att + 1) + " seed " + std::to_string(seed));
    AttemptResult ar = evolve_attempt(suite, builtins, limits, cfg, seed, gate, tr);
    if (ar.found) {
      // Re-verify independently before reporting success.
      EvalReport check = evaluate(*ar.found, ar.genome.dict, suite, limits, /*strict=*/true);
      if (passes_all(check, suite)) {
        tr.line("FOUND : " + suite.name + " " + disassemble(*ar.found, ar.genome.dict) + " ;");
        out.found = ar.found;
        out.genome = std::move(ar.genome);
        out.genes = std::move(ar.genes);
        out.transcript = tr.text;
        return out;
      }
      tr.line("# verification failed, discarding candidate");
    }
    out.genome = std::move(ar.genome);
    out.genes = std::move(ar.genes);
  }
  tr.line("# no full-pass program found");
  out.transcript = tr.text;
  return out;
}

Program inline_genes(const Program& program, const Dictionary& dict) {
  DecodeResult dec = decode(program, dict);
  if (!dec.ok) throw InlineError("inline: " + dec.error);
  const std::int32_t old_len = static_cast<std::int32_t>(program.size());

  // Expand every instruction; user-word calls splice in their (recursively
  // inlined) body without its END byte.
  std::vector<std::vector<std::uint8_t>> segs;
  std::vector<std::int32_t> new_off(old_len + 1, -1);
  std::int32_t cur = 0;
  segs.reserve(dec.instrs.size());
  for (const Instr& in : dec.instrs) {
    new_off[in.offset] = cur;
    if (in.code == code_of(Op::End)) {
      segs.push_back({code_of(Op::End)});
      cur += 1;
      continue;
    }
    if (!builtin_code(in.code)) {
      const Word& w = dict.at(in.code);
      Program flat = inline_genes(w.body, dict);
      std::vector<std::uint8_t> seg(flat.bytes.begin(), flat.bytes.end() - 1);
      cur += static_cast<std::int32_t>(seg.size());
      segs.push_back(std::move(seg));
    } else {
      std::vector<std::uint8_t> seg(program.bytes.begin() + in.offset,
                                    program.bytes.begin() + in.offset + in.size);
      cur += in.size;
      segs.push_back(std::move(seg));
    }
  }
  new_off[old_len] = cur;

  Program out;
  out.bytes.reserve(cur);
  for (std::size_t i = 0; i < dec.instrs.size(); ++i) {
    const Instr& in = dec.instrs[i];
    if (jump_code(in.code)) {
      std::int32_t t = jump_target(in.offset + 1, in.operand);
      if (t == old_len) t = old_len - 1;  // jumping past END and onto END halt alike
      std::int32_t nt = new_off[t];
      std::int32_t nop_addr = new_off[in.offset] + 1;
      std::int32_t rel = nt - nop_addr;
      if (rel < -128 || rel > 127 || rel == 0)
        throw InlineError("inline: jump offset out of range after expansion");
      segs[i][1] = static_cast<std::uint8_t>(static_cast<std::int8_t>(rel));
    }
    out.bytes.insert(out.bytes.end(), segs[i].begin(), segs[i].end());
  }
  return out;
}

TestSuite derive_selector_suite(const TestSuite& suite, const Program& p, const Dictionary& dict,
                                const ExecLimits& limits) {
  EvalReport rep = evaluate(p, dict, suite, limits, /*strict=*/true);
  TestSuite out;
  out.name = suite.name + "_SEL";
  out.comment = "selector";
  out.m = suite.m;
  out.n = 1;
  out.items.reserve(suite.items.size());
  for (std::size_t i = 0; i < suite.items.size(); ++i) {
    TestItem it;
    it.inputs = suite.items[i].inputs;
    it.outputs = {rep.passed(i) ? 1 : 0};
    out.items.push_back(std::move(it));
  }
  return out;
}

Program compose_partition(const Program& q, const Program& p, const Program& r, Dictionary& dict,
                          const TestSuite& suite, const ExecLimits& limits) {
  auto failing = [&](const EvalReport& rep, const TestSuite& s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.items.size(); ++i)
      if (!rep.passed(i)) out.push_back(i);
    return out;
  };

  StackEffect qe = static_analyze(q, dict);
  if (!qe.valid || qe.consumed != suite.m || (qe.produced != 1 && qe.produced != 1 + suite.m))
    throw ComposeError("selector signature does not fit the suite", {});
  const bool preserving = qe.produced == 1 + suite.m;

  TestSuite sel = derive_selector_suite(suite, p, dict, limits);
  EvalReport qrep = evaluate(q, dict, sel, limits, /*strict=*/!preserving);
  if (!passes_all(qrep, sel))
    throw ComposeError("selector program fails the derived selector suite", failing(qrep, sel));

  TestSuite rest;
  rest.name = suite.name + "_REST";
  rest.m = suite.m;
  rest.n = suite.n;
  for (std::size_t i = 0; i < suite.items.size(); ++i)
    if (sel.items[i].outputs[0] == 0) rest.items.push_back(suite.items[i]);
  if (!rest.items.empty()) {
    EvalReport rrep = evaluate(r, dict, rest, limits, /*strict=*/true);
    if (!passes_all(rrep, rest))
      throw ComposeError("complement program fails its item set", failing(rrep, rest));
  }

  auto install = [&](const char* prefix, const Program& prog) {
    StackEffect eff = static_analyze(prog, dict);
    if (!eff.valid) throw ComposeError(std::string(prefix) + ": invalid program", {});
    char name[24];
    std::snprintf(name, sizeof name, "%s_%03d", prefix, dict.next_code());
    return dict.add_word(name, prog, eff.consumed, eff.produced, true);
  };
  std::uint8_t cq = install("Q", q);
  std::uint8_t cp = install("P", p);
  std::uint8_t cr = install("R", r);

  // A selector with signature (m,1) consumes the inputs P and R still need,
  // so the dispatcher first duplicates the top m values for it.
  Program out;
  if (!preserving) {
    if (suite.m > 5)
      throw ComposeError("selector prologue supports at most 5 inputs", {});
    static constexpr Op kCopy[] = {Op::Dup, Op::Over, Op::Pick2, Op::Pick3, Op::Pick4};
    for (int i = 0; i < suite.m; ++i) out.bytes.push_back(code_of(kCopy[suite.m - 1]));
  }
  // Selector true -> run P; false -> run R and skip over P.
  out.bytes.insert(out.bytes.end(),
                   {cq, code_of(Op::If), 4, cr, code_of(Op::Goto), 2, cp, code_of(Op::End)});

  EvalReport final = evaluate(out, dict, suite, limits, /*strict=*/true);
  if (!passes_all(final, suite))
    throw ComposeError("composed program fails the suite", failing(final, suite));
  return out;
}

}  // namespace gene
