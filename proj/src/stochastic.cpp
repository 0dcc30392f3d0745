#include "gene/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "code_meta.hpp"

namespace gene {

void FrequencyModel::add_program(const Program& prog, const Dictionary& dict) {
  (void)dict;
  const auto& b = prog.bytes;
  int prev = -1;
  std::size_t i = 0;
  while (i < b.size()) {
    std::uint8_t c = b[i];
    if (c == code_of(Op::End)) break;
    ++unigram[c];
    ++uni_total;
    if (prev >= 0) {
      ++bigram[(static_cast<std::size_t>(prev) << 8) | c];
      ++row_total[prev];
    }
    if (builtin_code(c) && operand_code(c)) {
      if (c == code_of(Op::Const) && i + 1 < b.size())
        ++const_counts[static_cast<std::int8_t>(b[i + 1])];
      i += 2;
    } else {
      i += 1;
    }
    prev = c;
  }
}

FrequencyModel build_model(const PartialProgramList& partials, const Dictionary& dict) {
  FrequencyModel m;
  for (const PartialEntry& e : partials.entries()) m.add_program(e.prog, dict);
  return m;
}

FrequencyModel build_model(const std::vector<Program>& programs, const Dictionary& dict) {
  FrequencyModel m;
  for (const Program& p : programs) m.add_program(p, dict);
  return m;
}

std::string dump_model(const FrequencyModel& model, const Dictionary& dict) {
  std::ostringstream out;
  for (int c = 0; c < 256; ++c)
    if (model.unigram[c]) out << dict.at(static_cast<std::uint8_t>(c)).name << ' '
                              << model.unigram[c] << '\n';
  for (int a = 0; a < 256; ++a)
    for (int b = 0; b < 256; ++b) {
      std::uint32_t n = model.bigram[(static_cast<std::size_t>(a) << 8) | b];
      if (n)
        out << dict.at(static_cast<std::uint8_t>(a)).name << ' '
            << dict.at(static_cast<std::uint8_t>(b)).name << ' ' << n << '\n';
    }
  for (auto [v, n] : model.const_counts) out << "CONST " << v << ' ' << n << '\n';
  return out.str();
}

FrequencyModel parse_model(std::string_view text, const Dictionary& dict) {
  FrequencyModel m;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line =
        text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    std::vector<std::string> toks;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      if (j > i) toks.emplace_back(line.substr(i, j - i));
      i = j;
    }
    if (toks.empty() || toks[0][0] == '#') continue;

    auto to_u64 = [&](const std::string& s, std::uint64_t& out_v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out_v);
      return ec == std::errc() && p == s.data() + s.size();
    };
    auto code_for = [&](const std::string& name) -> std::uint8_t {
      const Word* w = dict.find(name);
      if (!w) throw ParseError(line_no, "unknown word in model: " + name);
      return w->code;
    };

    std::uint64_t count = 0;
    if (toks.size() == 2) {
      if (!to_u64(toks[1], count)) throw ParseError(line_no, "bad count");
      std::uint8_t c = code_for(toks[0]);
      m.unigram[c] += count;
      m.uni_total += count;
    } else if (toks.size() == 3) {
      if (!to_u64(toks[2], count)) throw ParseError(line_no, "bad count");
      int v = 0;
      auto [p, ec] = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), v);
      bool second_is_int = ec == std::errc() && p == toks[1].data() + toks[1].size();
      if (toks[0] == "CONST" && second_is_int) {
        if (v < -128 || v > 127) throw ParseError(line_no, "operand out of range");
        m.const_counts[v] += count;
      } else {
        std::uint8_t a = code_for(toks[0]);
        std::uint8_t b = code_for(toks[1]);
        m.bigram[(static_cast<std::size_t>(a) << 8) | b] += static_cast<std::uint32_t>(count);
        m.row_total[a] += count;
      }
    } else {
      throw ParseError(line_no, "expected 2 or 3 tokens");
    }
  }
  return m;
}

namespace {
constexpr int kMaxLen = 23;

int draw_cdf(Rng& rng, const std::vector<double>& cdf, std::size_t begin, std::size_t count) {
  double u = rng.unit() * cdf[begin + count - 1];
  std::size_t lo = begin, hi = begin + count - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (cdf[mid] <= u) lo = mid + 1;
    else hi = mid;
  }
  return static_cast<int>(lo - begin);
}
}  // namespace

struct Sampler::Impl {
  const Dictionary& dict;
  ForbiddenPairs forbidden;
  detail::CodeMeta meta;
  std::vector<std::uint8_t> codes;
  std::array<int, 256> code_pos;
  std::vector<double> uni_p, uni_cdf;
  std::vector<double> bi_p, bi_cdf;  // row-major, A x A
  std::vector<std::int8_t> const_vals;
  std::vector<double> const_cdf;
  detail::FastAnalyzer analyzer;

  Impl(const FrequencyModel& model, const SearchAlphabet& alphabet,
       const ForbiddenPairs& forb, const Dictionary& d)
      : dict(d), forbidden(forb), meta(detail::CodeMeta::from(d)) {
    // CONST operand support: the configured pool plus every observed value.
    std::set<int> support(alphabet.const_values.begin(), alphabet.const_values.end());
    for (auto [v, n] : model.const_counts) support.insert(v);
    std::uint64_t const_total = 0;
    for (auto [v, n] : model.const_counts) const_total += n;
    double acc = 0.0;
    for (int v : support) {
      auto it = model.const_counts.find(v);
      double w = (it != model.const_counts.end() && const_total)
                     ? static_cast<double>(it->second) / static_cast<double>(const_total)
                     : FrequencyModel::kFloor;
      const_vals.push_back(static_cast<std::int8_t>(v));
      acc += w;
      const_cdf.push_back(acc);
    }

    code_pos.fill(-1);
    for (std::uint8_t c : alphabet.codes) {
      if (meta.kind[c] == detail::CodeKind::Dynamic || c == code_of(Op::End)) continue;
      if (c == code_of(Op::Const) && const_vals.empty()) continue;
      code_pos[c] = static_cast<int>(codes.size());
      codes.push_back(c);
    }
    const std::size_t a = codes.size();
    uni_p.resize(a);
    uni_cdf.resize(a);
    double total = 0.0;
    for (std::size_t i = 0; i < a; ++i) total += model.uni_raw(codes[i]);
    acc = 0.0;
    for (std::size_t i = 0; i < a; ++i) {
      uni_p[i] = model.uni_raw(codes[i]) / total;
      acc += uni_p[i];
      uni_cdf[i] = acc;
    }
    bi_p.resize(a * a);
    bi_cdf.resize(a * a);
    for (std::size_t r = 0; r < a; ++r) {
      double rt = 0.0;
      for (std::size_t i = 0; i < a; ++i) rt += model.bi_raw(codes[r], codes[i]);
      acc = 0.0;
      for (std::size_t i = 0; i < a; ++i) {
        bi_p[r * a + i] = model.bi_raw(codes[r], codes[i]) / rt;
        acc += bi_p[r * a + i];
        bi_cdf[r * a + i] = acc;
      }
    }
  }
};

Sampler::Sampler(const FrequencyModel& model, const SearchAlphabet& alphabet,
                 const ForbiddenPairs& forbidden, const Dictionary& dict)
    : impl_(std::make_unique<Impl>(model, alphabet, forbidden, dict)) {}
Sampler::~Sampler() = default;
Sampler::Sampler(Sampler&&) noexcept = default;

std::optional<Sample> Sampler::try_sample(Rng& rng, const GenConfig& cfg) {
  Impl& im = *impl_;
  const std::size_t a = im.codes.size();
  if (a == 0) return std::nullopt;
  int lmin = std::max(1, cfg.lmin);
  int lmax = std::min(kMaxLen, std::max(lmin, cfg.lmax));
  int len = lmin + static_cast<int>(rng.below(static_cast<std::uint64_t>(lmax - lmin + 1)));

  std::array<std::uint8_t, kMaxLen> seq;
  std::array<std::int16_t, kMaxLen> offs;
  int off = 0;
  int prev = -1;
  for (int i = 0; i < len; ++i) {
    int pick;
    if (i == 0 || cfg.mode == GenMode::Unigram) {
      pick = draw_cdf(rng, im.uni_cdf, 0, a);
    } else {
      pick = draw_cdf(rng, im.bi_cdf, static_cast<std::size_t>(prev) * a, a);
    }
    seq[i] = im.codes[pick];
    offs[i] = static_cast<std::int16_t>(off);
    off += im.meta.size[seq[i]];
    prev = pick;
  }
  const int body_len = off;
  std::array<std::uint8_t, 2 * kMaxLen + 1> bytes;
  std::array<std::int16_t, kMaxLen> jump_to;
  int njump = 0;
  for (int i = 0; i < len; ++i) {
    bytes[offs[i]] = seq[i];
    auto kind = im.meta.kind[seq[i]];
    if (kind == detail::CodeKind::Goto || kind == detail::CodeKind::If) {
      // Uniform over the boundaries: the len instruction offsets plus END.
      int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(len + 1)));
      int target = t == len ? body_len : offs[t];
      bytes[offs[i] + 1] =
          static_cast<std::uint8_t>(static_cast<std::int8_t>(target - (offs[i] + 1)));
      jump_to[njump++] = static_cast<std::int16_t>(target);
    } else if (seq[i] == code_of(Op::Const)) {
      int pick = draw_cdf(rng, im.const_cdf, 0, im.const_vals.size());
      bytes[offs[i] + 1] = static_cast<std::uint8_t>(im.const_vals[pick]);
    }
  }
  bytes[body_len] = code_of(Op::End);

  // Forbidden pairs, unless the pair's second instruction is a jump target.
  for (int i = 1; i < len; ++i) {
    if (!im.forbidden.contains(seq[i - 1], seq[i])) continue;
    bool resolved = false;
    for (int j = 0; j < njump; ++j)
      if (jump_to[j] == offs[i]) {
        resolved = true;
        break;
      }
    if (!resolved) return std::nullopt;
  }

  detail::FastSig sig = im.analyzer.analyze(bytes.data(), body_len + 1, im.meta);
  if (!sig.valid) return std::nullopt;
  Sample s;
  s.prog.bytes.assign(bytes.begin(), bytes.begin() + body_len + 1);
  s.consumed = sig.p;
  s.produced = sig.q;
  return s;
}

double Sampler::instr_prob(GenMode mode, int prev_code, std::uint8_t code) const {
  const Impl& im = *impl_;
  int i = im.code_pos[code];
  if (i < 0) throw std::invalid_argument("code not in sampling alphabet");
  if (prev_code < 0 || mode == GenMode::Unigram) return im.uni_p[i];
  int r = im.code_pos[static_cast<std::uint8_t>(prev_code)];
  if (r < 0) throw std::invalid_argument("predecessor not in sampling alphabet");
  return im.bi_p[static_cast<std::size_t>(r) * im.codes.size() + i];
}

HitEstimate program_probability(const FrequencyModel& model, const SearchAlphabet& alphabet,
                                const ForbiddenPairs& forbidden, const Dictionary& dict,
                                const Program& program, GenMode mode) {
  Sampler sampler(model, alphabet, forbidden, dict);
  DecodeResult dec = decode(program, dict);
  if (!dec.ok) throw std::invalid_argument("program does not decode: " + dec.error);
  HitEstimate h;
  h.epsilon = 1.0;
  int prev = -1;
  for (const Instr& in : dec.instrs) {
    if (in.code == code_of(Op::End)) break;
    h.epsilon *= sampler.instr_prob(mode, prev, in.code);
    prev = in.code;
  }
  double inv = 1.0 / h.epsilon;
  h.n = inv >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(std::llround(inv));
  return h;
}

namespace {

struct CycleOut {
  PartialProgramList partials{400};
  PassHistogram hist;
  std::optional<Program> found;
  std::uint64_t found_at = UINT64_MAX;
  std::uint64_t attempts = 0;
  std::uint64_t evaluated = 0;
};

void run_generation(const TestSuite& suite, const Dictionary& dict, const FrequencyModel& model,
                    const SearchAlphabet& alphabet, const ForbiddenPairs& forbidden,
                    const ExecLimits& limits, GenMode mode, int lmin, int lmax, Budget budget,
                    std::uint64_t seed, int np, CycleOut& out, std::atomic<bool>& stop) {
  Sampler sampler(model, alphabet, forbidden, dict);
  Executor ex;
  Rng rng(seed);
  BudgetGate gate(budget);
  GenConfig cfg{lmin, lmax, mode};
  out.partials = PartialProgramList(np);
  out.hist.resize(suite.items.size());
  const int items = static_cast<int>(suite.items.size());

  while (!gate.exhausted()) {
    if ((gate.used() & 1023) == 0 && stop.load(std::memory_order_relaxed)) break;
    gate.charge();
    ++out.attempts;
    std::optional<Sample> s = sampler.try_sample(rng, cfg);
    if (!s) continue;
    ++out.evaluated;
    if (s->consumed != suite.m || s->produced != suite.n) {
      out.hist.add(0);
      continue;
    }
    int pass = evaluate_prechecked(ex, s->prog.bytes.data(), s->prog.size(), dict, suite, limits,
                                   /*strict=*/true);
    out.hist.add(static_cast<std::size_t>(pass));
    if (pass == items) {
      if (!out.found) {
        out.found = s->prog;
        out.found_at = gate.used();
      }
      stop.store(true, std::memory_order_relaxed);
      break;
    }
    if (pass > 0) out.partials.insert(s->prog, pass);
  }
}

}  // namespace

GenerateResult generate_programs(const TestSuite& suite, const Dictionary& dict,
                                 const SearchAlphabet& alphabet, const ForbiddenPairs& forbidden,
                                 const ExecLimits& limits, const FrequencyModel& model,
                                 GenMode mode, int lmin, int lmax, Budget budget,
                                 std::uint64_t seed, int np, int workers) {
  GenerateResult r;
  r.partials = PartialProgramList(np);
  r.histogram.resize(suite.items.size());
  const int nworkers = std::max(1, workers);
  Budget worker_budget = budget;
  if (worker_budget.max_attempts)
    worker_budget.max_attempts = (worker_budget.max_attempts + nworkers - 1) / nworkers;

  auto t0 = std::chrono::steady_clock::now();
  std::vector<CycleOut> outs(nworkers);
  std::atomic<bool> stop{false};
  {
    std::vector<std::thread> threads;
    for (int w = 1; w < nworkers; ++w) {
      threads.emplace_back([&, w] {
        run_generation(suite, dict, model, alphabet, forbidden, limits, mode, lmin, lmax,
                       worker_budget, derive_seed(seed, static_cast<std::uint64_t>(w)), np,
                       outs[w], stop);
      });
    }
    run_generation(suite, dict, model, alphabet, forbidden, limits, mode, lmin, lmax,
                   worker_budget, seed, np, outs[0], stop);
    for (auto& t : threads) t.join();
  }
  std::uint64_t best_at = UINT64_MAX;
  for (CycleOut& o : outs) {
    r.partials.merge(o.partials);
    r.histogram.merge(o.hist);
    r.counters.generated += o.attempts;
    r.counters.evaluated += o.evaluated;
    if (o.found && o.found_at < best_at) {
      best_at = o.found_at;
      r.found = o.found;
    }
  }
  r.counters.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

BaseStepResult base_step(const TestSuite& suite, const Dictionary& dict,
                         const SearchAlphabet& alphabet, const ForbiddenPairs& forbidden,
                         const ExecLimits& limits, const BaseStepConfig& cfg) {
  BaseStepResult r;
  r.partials = PartialProgramList(cfg.np);
  r.histogram.resize(suite.items.size());

  EnumConfig ec;
  ec.max_len = cfg.l0;
  ec.budget = cfg.enum_budget;
  ec.np = cfg.np;
  ec.workers = cfg.workers;
  SearchResult sr = enumerate_programs(suite, dict, alphabet, forbidden, limits, ec);
  r.partials.merge(sr.partials);
  r.histogram.merge(sr.histogram);
  r.counters.generated += sr.counters.generated;
  r.counters.evaluated += sr.counters.evaluated;
  r.model = build_model(r.partials, dict);
  if (sr.found) {
    r.found = sr.found;
    r.counters.seconds = sr.counters.seconds;
    return r;
  }

  const int cycles = std::max(1, cfg.cycles);
  Budget cycle_budget;
  cycle_budget.max_attempts =
      cfg.gen_budget.max_attempts ? (cfg.gen_budget.max_attempts + cycles - 1) / cycles : 0;
  cycle_budget.max_seconds = cfg.gen_budget.max_seconds > 0 ? cfg.gen_budget.max_seconds / cycles : 0;

  const int lmin = cfg.l0 + 1;
  const int lmax = std::max(lmin, cfg.l1);
  const int nworkers = std::max(1, cfg.workers);

  for (int cycle = 0; cycle < cycles; ++cycle) {
    GenMode mode = (cycle % 2 == 0) ? GenMode::Unigram : GenMode::Markov;
    GenerateResult gr = generate_programs(
        suite, dict, alphabet, forbidden, limits, r.model, mode, lmin, lmax, cycle_budget,
        derive_seed(cfg.seed, static_cast<std::uint64_t>(cycle) << 8), cfg.np, nworkers);
    r.partials.merge(gr.partials);
    r.histogram.merge(gr.histogram);
    r.counters.generated += gr.counters.generated;
    r.counters.evaluated += gr.counters.evaluated;
    if (gr.found) {
      r.found = gr.found;
      break;
    }
    r.model = build_model(r.partials, dict);
  }
  return r;
}

}  // namespace gene
