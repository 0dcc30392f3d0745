#include "gene/enumerate.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <climits>
#include <cmath>
#include <sstream>
#include <thread>

#include "code_meta.hpp"

namespace gene {

bool SearchAlphabet::has(std::uint8_t code) const {
  for (std::uint8_t c : codes)
    if (c == code) return true;
  return false;
}

std::vector<std::int8_t> default_const_values() {
  std::vector<std::int8_t> v;
  for (int x = -3; x <= 12; ++x)
    if (x != 0) v.push_back(static_cast<std::int8_t>(x));
  return v;
}

SearchAlphabet default_search_alphabet(const Dictionary& dict) {
  SearchAlphabet a;
  for (int c = 1; c < kBuiltinCount; ++c) {
    Op op = static_cast<Op>(c);
    if (op == Op::Pick || op == Op::Roll || op == Op::Zero) continue;
    a.codes.push_back(static_cast<std::uint8_t>(c));
  }
  (void)dict;
  a.const_values = default_const_values();
  return a;
}

SearchAlphabet alphabet_from_names(const std::vector<std::string>& names, const Dictionary& dict) {
  SearchAlphabet a;
  for (const std::string& n : names) {
    const Word* w = dict.find(n);
    if (!w) throw std::runtime_error("unknown word in alphabet: " + n);
    if (w->code == code_of(Op::End)) continue;
    a.codes.push_back(w->code);
  }
  a.const_values = default_const_values();
  return a;
}

ForbiddenPairs ForbiddenPairs::defaults(const Dictionary& dict) {
  (void)dict;
  ForbiddenPairs f;
  auto p = [&](Op a, Op b) { f.add(code_of(a), code_of(b)); };
  p(Op::Dup, Op::Drop);
  p(Op::Swap, Op::Swap);
  p(Op::Over, Op::Drop);
  p(Op::Neg, Op::Neg);
  p(Op::Not, Op::Not);
  p(Op::Inc, Op::Dec);
  p(Op::Dec, Op::Inc);
  p(Op::Rot, Op::RotDown);
  p(Op::RotDown, Op::Rot);
  return f;
}

bool PartialProgramList::insert(const Program& prog, int pass_count) {
  if (pass_count <= 0) return false;
  if (static_cast<int>(set_.size()) >= cap_) {
    const Key& worst = *std::prev(set_.end());
    if (pass_count < worst.pass) return false;
    if (pass_count == worst.pass) {
      if (prog.bytes.size() > worst.prog.bytes.size()) return false;
      if (prog.bytes.size() == worst.prog.bytes.size() && !(prog.bytes < worst.prog.bytes))
        return false;
    }
  }
  auto [it, inserted] = set_.insert(Key{pass_count, prog});
  if (!inserted) return false;
  if (static_cast<int>(set_.size()) > cap_) set_.erase(std::prev(set_.end()));
  return true;
}

void PartialProgramList::merge(const PartialProgramList& other) {
  for (const Key& k : other.set_) insert(k.prog, k.pass);
}

std::vector<PartialEntry> PartialProgramList::entries() const {
  std::vector<PartialEntry> out;
  out.reserve(set_.size());
  for (const Key& k : set_) out.push_back({k.prog, k.pass});
  return out;
}

int PartialProgramList::best_pass() const { return set_.empty() ? 0 : set_.begin()->pass; }
int PartialProgramList::worst_pass() const {
  return set_.empty() ? 0 : std::prev(set_.end())->pass;
}

void PassHistogram::merge(const PassHistogram& o) {
  if (o.counts.size() > counts.size()) counts.resize(o.counts.size(), 0);
  for (std::size_t i = 0; i < o.counts.size(); ++i) counts[i] += o.counts[i];
}

std::uint64_t PassHistogram::total() const {
  std::uint64_t t = 0;
  for (std::uint64_t c : counts) t += c;
  return t;
}

std::string histogram_report(const PassHistogram& h) {
  std::ostringstream out;
  for (std::size_t k = 0; k < h.counts.size(); ++k) out << k << ": " << h.counts[k] << '\n';
  return out.str();
}

std::string partials_report(const PartialProgramList& partials, const Dictionary& dict) {
  std::ostringstream out;
  for (const PartialEntry& e : partials.entries())
    out << e.pass_count << " : " << disassemble(e.prog, dict) << " ;\n";
  return out.str();
}

ParsedReport parse_report(std::string_view text, const Dictionary& dict) {
  ParsedReport r;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line =
        text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') continue;

    std::uint64_t num = 0;
    auto [p, ec] = std::from_chars(line.data() + i, line.data() + line.size(), num);
    if (ec != std::errc()) throw ParseError(line_no, "expected a count or pass line");
    std::size_t after = static_cast<std::size_t>(p - line.data());
    if (after < line.size() && line[after] == ':') {
      // histogram line: k: count
      std::uint64_t count = 0;
      std::size_t j = after + 1;
      while (j < line.size() && line[j] == ' ') ++j;
      auto [p2, ec2] = std::from_chars(line.data() + j, line.data() + line.size(), count);
      if (ec2 != std::errc()) throw ParseError(line_no, "bad histogram count");
      r.histogram.add(num, count);
    } else {
      // partial line: pass : body ;
      std::size_t colon = line.find(':', after);
      if (colon == std::string_view::npos) throw ParseError(line_no, "missing ':'");
      std::size_t semi = line.rfind(';');
      if (semi == std::string_view::npos || semi <= colon)
        throw ParseError(line_no, "missing ';'");
      std::string body(line.substr(colon + 1, semi - colon - 1));
      r.partials.push_back({assemble_body(body, dict), static_cast<int>(num)});
    }
  }
  return r;
}

std::uint64_t count_space(std::uint64_t alphabet_size, int length) {
  std::uint64_t r = 1;
  for (int i = 0; i < length; ++i) {
    if (alphabet_size != 0 && r > UINT64_MAX / alphabet_size) return UINT64_MAX;
    r *= alphabet_size;
  }
  return r;
}

namespace {

constexpr int kMaxLen = 24;
constexpr int kMaxBytes = 2 * kMaxLen + 1;
constexpr std::uint64_t kFlushEvery = 8192;

struct Shared {
  const TestSuite& suite;
  const Dictionary& dict;
  const SearchAlphabet& alpha;
  const ForbiddenPairs& forbidden;
  const ExecLimits& limits;
  detail::CodeMeta meta;
  bool alpha_has_jump = false;
  bool alpha_has_goto = false;
  int max_gain = 0;  // largest produced-consumed over the alphabet
  int max_drop = 0;  // largest consumed-produced
  Budget budget;
  std::chrono::steady_clock::time_point start;
  std::atomic<std::uint64_t> generated{0};
  std::atomic<bool> stop{false};

  bool over_budget(std::uint64_t local_add) {
    std::uint64_t g = generated.fetch_add(local_add, std::memory_order_relaxed) + local_add;
    if (budget.max_attempts && g >= budget.max_attempts) return true;
    if (budget.max_seconds > 0.0) {
      double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (el >= budget.max_seconds) return true;
    }
    return false;
  }
};

struct WorkerOut {
  PartialProgramList partials{400};
  PassHistogram hist;
  std::optional<Program> found;
  int found_first_idx = INT_MAX;
  std::uint64_t generated = 0;
  std::uint64_t evaluated = 0;
  bool budget_hit = false;
};

class Walker {
 public:
  Walker(Shared& sh, int np) : sh_(sh), out_{PartialProgramList(np), {}, {}, INT_MAX, 0, 0, false} {
    out_.hist.resize(sh.suite.items.size());
    items_ = static_cast<int>(sh.suite.items.size());
    m_ = sh.suite.m;
    n_ = sh.suite.n;
    ntargets_ = 0;
  }

  WorkerOut& out() { return out_; }

  // Enumerates every sequence of exactly `len` instructions whose first
  // opcode index lies in [first_lo, first_hi).
  void run_level(int len, int first_lo, int first_hi) {
    len_ = len;
    for (int fi = first_lo; fi < first_hi && !stopped_; ++fi) {
      first_idx_ = fi;
      descend(0, fi, 0, 0, 0, false);
    }
    flush();
  }

 private:
  void flush() {
    if (pending_ == 0) return;
    if (sh_.over_budget(pending_)) {
      stopped_ = true;
      out_.budget_hit = true;
      sh_.stop.store(true, std::memory_order_relaxed);
    }
    if (sh_.stop.load(std::memory_order_relaxed)) stopped_ = true;
    pending_ = 0;
  }

  void charge(std::uint64_t n) {
    out_.generated += n;
    pending_ += n;
    if (pending_ >= kFlushEvery) flush();
  }

  void descend(int slot, int alpha_idx, int off, int depth, int shortfall, bool goto_seen) {
    if (stopped_) return;
    const std::uint8_t c = sh_.alpha.codes[alpha_idx];
    const auto kind = sh_.meta.kind[c];
    if (kind == detail::CodeKind::Dynamic) return;

    bool forb = slot > 0 && sh_.forbidden.contains(codes_[slot - 1], c);
    if (forb && !sh_.alpha_has_jump) return;

    int d = depth, s = shortfall;
    bool gseen = goto_seen;
    if (!gseen) {
      int need = sh_.meta.consumed[c];
      if (need - d > s) s = need - d;
      if (s > m_) return;  // fallthrough path already consumes too many inputs
      d = d - need + sh_.meta.produced[c];
      if (kind == detail::CodeKind::Goto) gseen = true;
      if (!sh_.alpha_has_goto) {
        // without GOTO the fallthrough path reaches END, so its depth there
        // must land exactly on n-m
        int remaining = len_ - 1 - slot;
        int want = n_ - m_;
        if (d - want > remaining * sh_.max_drop || want - d > remaining * sh_.max_gain) return;
      }
    }

    codes_[slot] = c;
    forb_[slot] = forb;
    offs_[slot] = static_cast<std::int16_t>(off);
    bytes_[off] = c;
    int sz = sh_.meta.size[c];
    if (sz == 2) bytes_[off + 1] = 1;  // placeholder; jumps/consts filled at the leaf

    if (slot + 1 == len_) {
      leaf(off + sz, d, s, gseen);
      return;
    }
    for (std::size_t i = 0; i < sh_.alpha.codes.size(); ++i) {
      descend(slot + 1, static_cast<int>(i), off + sz, d, s, gseen);
      if (stopped_) return;
    }
  }

  void leaf(int body_len, int d, int s, bool goto_seen) {
    const int len = body_len + 1;
    bytes_[body_len] = code_of(Op::End);

    njump_ = 0;
    nconst_ = 0;
    int nforb = 0;
    for (int i = 0; i < len_; ++i) {
      auto k = sh_.meta.kind[codes_[i]];
      if (k == detail::CodeKind::Goto || k == detail::CodeKind::If) jump_slot_[njump_++] = i;
      else if (codes_[i] == code_of(Op::Const)) const_slot_[nconst_++] = i;
      if (forb_[i]) ++nforb;
    }
    if (nconst_ > 0 && sh_.alpha.const_values.empty()) return;
    std::uint64_t const_combos = 1;
    for (int i = 0; i < nconst_; ++i) {
      std::uint64_t nv = sh_.alpha.const_values.size();
      const_combos = const_combos > UINT64_MAX / nv ? UINT64_MAX : const_combos * nv;
    }

    if (njump_ == 0) {
      if (nforb > 0 || s != m_ || d != n_ - m_) {
        charge(const_combos);
        return;
      }
      eval_const_combos(len);
      return;
    }

    // Jump operands range over every instruction boundary (including END).
    ntargets_ = len_ + 1;
    for (int i = 0; i < len_; ++i) targets_[i] = offs_[i];
    targets_[len_] = static_cast<std::int16_t>(body_len);

    for (int i = 0; i < njump_; ++i) tsel_[i] = 0;
    for (;;) {
      if (stopped_) return;
      bool viable = true;
      for (int i = 0; i < njump_; ++i) {
        int o = offs_[jump_slot_[i]];
        int t = targets_[tsel_[i]];
        bytes_[o + 1] = static_cast<std::uint8_t>(static_cast<std::int8_t>(t - (o + 1)));
      }
      if (nforb > 0) {
        for (int i = 0; i < len_ && viable; ++i) {
          if (!forb_[i]) continue;
          bool resolved = false;
          for (int j = 0; j < njump_; ++j)
            if (targets_[tsel_[j]] == offs_[i]) {
              resolved = true;
              break;
            }
          viable = resolved;
        }
      }
      if (viable) {
        detail::FastSig sig = analyzer_.analyze(bytes_.data(), len, sh_.meta);
        if (sig.valid && sig.p == m_ && sig.q == n_) {
          eval_const_combos(len);
        } else {
          charge(const_combos);
        }
      } else {
        charge(const_combos);
      }
      // odometer over jump targets
      int i = njump_ - 1;
      while (i >= 0 && ++tsel_[i] == ntargets_) tsel_[i--] = 0;
      if (i < 0) break;
    }
  }

  void eval_const_combos(int len) {
    for (int i = 0; i < nconst_; ++i) csel_[i] = 0;
    const int nvals = static_cast<int>(sh_.alpha.const_values.size());
    for (;;) {
      if (stopped_) return;
      for (int i = 0; i < nconst_; ++i)
        bytes_[offs_[const_slot_[i]] + 1] =
            static_cast<std::uint8_t>(sh_.alpha.const_values[csel_[i]]);
      run_one(len);
      if (nconst_ == 0) return;
      int i = nconst_ - 1;
      while (i >= 0 && ++csel_[i] == nvals) csel_[i--] = 0;
      if (i < 0) return;
    }
  }

  void run_one(int len) {
    charge(1);
    ++out_.evaluated;
    int pass = evaluate_prechecked(ex_, bytes_.data(), static_cast<std::size_t>(len), sh_.dict,
                                   sh_.suite, sh_.limits, /*strict=*/true);
    out_.hist.add(static_cast<std::size_t>(pass));
    if (pass == items_) {
      if (!out_.found) {
        out_.found = Program{std::vector<std::uint8_t>(bytes_.begin(), bytes_.begin() + len)};
        out_.found_first_idx = first_idx_;
      }
    } else if (pass > 0) {
      out_.partials.insert(Program{std::vector<std::uint8_t>(bytes_.begin(), bytes_.begin() + len)},
                           pass);
    }
  }

  Shared& sh_;
  WorkerOut out_;
  Executor ex_;
  detail::FastAnalyzer analyzer_;
  int items_ = 0, m_ = 0, n_ = 0;
  int len_ = 0;
  int first_idx_ = 0;
  bool stopped_ = false;
  std::uint64_t pending_ = 0;

  std::array<std::uint8_t, kMaxBytes> bytes_{};
  std::array<std::uint8_t, kMaxLen> codes_{};
  std::array<bool, kMaxLen> forb_{};
  std::array<std::int16_t, kMaxLen> offs_{};
  std::array<int, kMaxLen> jump_slot_{}, const_slot_{};
  std::array<int, kMaxLen> tsel_{}, csel_{};
  std::array<std::int16_t, kMaxLen + 1> targets_{};
  int njump_ = 0, nconst_ = 0, ntargets_ = 0;
};

}  // namespace

SearchResult enumerate_programs(const TestSuite& suite, const Dictionary& dict,
                                const SearchAlphabet& alphabet, const ForbiddenPairs& forbidden,
                                const ExecLimits& limits, const EnumConfig& cfg) {
  SearchResult res;
  res.partials = PartialProgramList(cfg.np);
  res.histogram.resize(suite.items.size());

  Shared sh{suite,  dict,  alphabet, forbidden,  limits, detail::CodeMeta::from(dict),
            false,  false, 0,        0,          cfg.budget,
            std::chrono::steady_clock::now()};
  for (std::uint8_t c : alphabet.codes) {
    if (jump_code(c)) sh.alpha_has_jump = true;
    if (c == code_of(Op::Goto)) sh.alpha_has_goto = true;
    int net = sh.meta.produced[c] - sh.meta.consumed[c];
    sh.max_gain = std::max(sh.max_gain, net);
    sh.max_drop = std::max(sh.max_drop, -net);
  }
  if (alphabet.codes.empty() || cfg.max_len < 1) return res;
  int max_len = cfg.max_len > kMaxLen ? kMaxLen : cfg.max_len;
  const int nworkers =
      std::max(1, std::min<int>(cfg.workers, static_cast<int>(alphabet.codes.size())));

  for (int len = 1; len <= max_len; ++len) {
    std::vector<Walker> walkers;
    walkers.reserve(nworkers);
    for (int w = 0; w < nworkers; ++w) walkers.emplace_back(sh, cfg.np);

    const int a = static_cast<int>(alphabet.codes.size());
    const int chunk = (a + nworkers - 1) / nworkers;
    {
      std::vector<std::thread> threads;
      for (int w = 1; w < nworkers; ++w) {
        int lo = w * chunk, hi = std::min(a, (w + 1) * chunk);
        if (lo >= hi) continue;
        threads.emplace_back([&walkers, w, len, lo, hi] { walkers[w].run_level(len, lo, hi); });
      }
      walkers[0].run_level(len, 0, std::min(a, chunk));
      for (auto& t : threads) t.join();
    }

    bool budget_hit = false;
    int best_idx = INT_MAX;
    std::optional<Program> found;
    for (Walker& w : walkers) {
      WorkerOut& o = w.out();
      res.partials.merge(o.partials);
      res.histogram.merge(o.hist);
      res.counters.generated += o.generated;
      res.counters.evaluated += o.evaluated;
      budget_hit |= o.budget_hit;
      if (o.found && o.found_first_idx < best_idx) {
        best_idx = o.found_first_idx;
        found = o.found;
      }
    }
    if (!budget_hit) res.completed_len = len;
    if (found) {
      res.found = std::move(found);
      break;
    }
    if (budget_hit) {
      res.counters.budget_hit = true;
      break;
    }
  }
  res.counters.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - sh.start).count();
  return res;
}

}  // namespace gene
