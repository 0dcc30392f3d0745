#include "doctest.h"
#include "gene/enumerate.hpp"

#include <map>
#include <set>

#include "oracles.hpp"

using namespace gene;

namespace {

const Dictionary& dict() {
  static Dictionary d = Dictionary::builtins();
  return d;
}

SearchAlphabet alpha(std::initializer_list<const char*> names,
                     std::vector<std::int8_t> consts = default_const_values()) {
  SearchAlphabet a;
  for (const char* n : names) a.codes.push_back(dict().find(n)->code);
  a.const_values = std::move(consts);
  return a;
}

SearchResult search(const TestSuite& suite, const SearchAlphabet& a, int max_len,
                    int workers = 1, Budget budget = {}) {
  EnumConfig cfg;
  cfg.max_len = max_len;
  cfg.workers = workers;
  cfg.budget = budget;
  return enumerate_programs(suite, dict(), a, ForbiddenPairs::defaults(dict()), ExecLimits{}, cfg);
}

}  // namespace

TEST_CASE("count_space") {
  CHECK(count_space(33, 6) == 1291467969ull);
  CHECK(count_space(1, 5) == 1ull);
  CHECK(count_space(11, 3) == 1331ull);
  CHECK(count_space(33, 13) == UINT64_MAX);  // saturates
}

TEST_CASE("the default search alphabet has exactly 33 words") {
  SearchAlphabet a = default_search_alphabet(dict());
  CHECK(a.codes.size() == 33);
  CHECK_FALSE(a.has(code_of(Op::End)));
  CHECK_FALSE(a.has(code_of(Op::Pick)));
  CHECK_FALSE(a.has(code_of(Op::Roll)));
  CHECK_FALSE(a.has(code_of(Op::Zero)));
  CHECK(a.has(code_of(Op::Goto)));
  // the default CONST pool
  std::vector<std::int8_t> want;
  for (int v = -3; v <= 12; ++v)
    if (v) want.push_back(static_cast<std::int8_t>(v));
  CHECK(a.const_values == want);
}

TEST_CASE("default forbidden pairs") {
  ForbiddenPairs f = ForbiddenPairs::defaults(dict());
  CHECK(f.contains(code_of(Op::Dup), code_of(Op::Drop)));
  CHECK(f.contains(code_of(Op::Swap), code_of(Op::Swap)));
  CHECK(f.contains(code_of(Op::Over), code_of(Op::Drop)));
  CHECK(f.contains(code_of(Op::Inc), code_of(Op::Dec)));
  CHECK_FALSE(f.contains(code_of(Op::EqZ), code_of(Op::EqZ)));
}

TEST_CASE("rediscovers SQUARE over a two-word alphabet") {
  TestSuite s = oracle::unary_suite("SQUARE", oracle::sample_domain(-1000, 1000, 20, 1),
                                    [](Value x) { return oracle::mul(x, x); });
  SearchResult r = search(s, alpha({"DUP", "*"}), 2);
  REQUIRE(r.found.has_value());
  CHECK(r.found->bytes == std::vector<std::uint8_t>{code_of(Op::Dup), code_of(Op::Mul), 0});
  CHECK(r.completed_len == 2);
}

TEST_CASE("rediscovers MUL2 over the full default alphabet") {
  TestSuite s = oracle::unary_suite("MUL2", oracle::sample_domain(-1000, 1000, 20, 2),
                                    [](Value x) { return oracle::add(x, x); });
  SearchResult r = search(s, default_search_alphabet(dict()), 2);
  REQUIRE(r.found.has_value());
  // a two-instruction doubling program; CONST 2 * enumerates before DUP +
  EvalReport rep = evaluate(*r.found, dict(), s);
  CHECK(passes_all(rep, s));
  DecodeResult dec = decode(*r.found, dict());
  CHECK(dec.instrs.size() == 3);
}

TEST_CASE("rediscovers ODD as CONST 1 AND") {
  TestSuite s = oracle::unary_suite("ODD", oracle::sample_domain(-100000, 100000, 20, 3),
                                    [](Value x) { return x & 1; });
  SearchResult r = search(s, default_search_alphabet(dict()), 2);
  REQUIRE(r.found.has_value());
  CHECK(r.found->bytes ==
        std::vector<std::uint8_t>{code_of(Op::Const), 1, code_of(Op::And), 0});
}

TEST_CASE("reports partials and histogram when nothing passes in full") {
  // factorial over the paper's 14 admissible words, too short to solve
  std::vector<std::pair<std::vector<Value>, std::vector<Value>>> rows;
  for (int n = 1; n <= 13; ++n) rows.push_back({{n}, {oracle::factorial(n)}});
  TestSuite s = oracle::make_suite("FACTORIAL", std::move(rows));
  SearchAlphabet a = alpha({"GOTO", "IF", "CONST", "DUP", "DROP", "SWAP", "OVER", "ROT", "-ROT",
                            "+", "-", "*", "=", "--"});
  SearchResult r = search(s, a, 4);
  CHECK_FALSE(r.found.has_value());
  CHECK_FALSE(r.partials.empty());
  // DUP -- * handles 2 and 6; nothing longer fits in four instructions
  CHECK(r.partials.best_pass() >= 2);
  CHECK(r.histogram.total() == r.counters.evaluated);
  CHECK(r.counters.generated >= r.counters.evaluated);
}

TEST_CASE("a forbidden pair is kept when a jump targets its second half") {
  // swap exactly when the top input is positive: the shortest solution ends
  // SWAP SWAP with the IF landing between them
  auto pairs = oracle::sample_pairs(-50, 50, 24, 4);
  std::vector<std::pair<std::vector<Value>, std::vector<Value>>> rows;
  for (auto [a_, b_] : pairs) {
    if (b_ > 0)
      rows.push_back({{a_, b_}, {b_, a_}});
    else
      rows.push_back({{a_, b_}, {a_, b_}});
  }
  TestSuite s = oracle::make_suite("CONDSWAP", std::move(rows));
  SearchResult r = search(s, alpha({"DUP", "0>", "IF", "SWAP"}), 5);
  REQUIRE(r.found.has_value());
  EvalReport rep = evaluate(*r.found, dict(), s);
  CHECK(passes_all(rep, s));
  // the found program contains the adjacent SWAP SWAP pair
  bool has_pair = false;
  const auto& b = r.found->bytes;
  for (std::size_t i = 0; i + 1 < b.size(); ++i)
    if (b[i] == code_of(Op::Swap) && b[i + 1] == code_of(Op::Swap)) has_pair = true;
  CHECK(has_pair);
}

TEST_CASE("pruned programs always have an unpruned equivalent of equal or shorter length") {
  // brute force over an eight-word alphabet at lengths <= 4
  const std::vector<std::uint8_t> pool = {
      code_of(Op::Const), code_of(Op::Dup), code_of(Op::Drop), code_of(Op::Swap),
      code_of(Op::Over),  code_of(Op::Rot), code_of(Op::Neg),  code_of(Op::Inc)};
  ForbiddenPairs forb = ForbiddenPairs::defaults(dict());
  Executor ex;
  const std::vector<std::vector<Value>> stacks = {
      {11, -7, 3, 5}, {0, 2, 2, -9}, {1000, 1, -1, 42}};

  auto behaviour = [&](const Program& p) {
    std::string sig;
    for (const auto& st : stacks) {
      Fault f = ex.run(p.bytes.data(), p.bytes.size(), dict(), st, ExecLimits{});
      if (f != Fault::None) {
        sig += "F;";
        continue;
      }
      for (Value v : ex.stack()) sig += std::to_string(v) + ",";
      sig += ";";
    }
    return sig;
  };

  // behaviours of unpruned programs per length (length 0 = the empty program)
  std::vector<std::set<std::string>> unpruned(5);
  unpruned[0].insert(behaviour(Program{{0}}));
  std::vector<std::pair<Program, int>> pruned;

  std::vector<int> idx;
  for (int len = 1; len <= 4; ++len) {
    idx.assign(len, 0);
    for (;;) {
      Program p;
      bool bad = false;
      for (int i = 0; i < len; ++i) {
        std::uint8_t c = pool[idx[i]];
        if (i > 0 && forb.contains(pool[idx[i - 1]], c)) bad = true;
        p.bytes.push_back(c);
        if (c == code_of(Op::Const)) p.bytes.push_back(1);
      }
      p.bytes.push_back(0);
      if (bad)
        pruned.emplace_back(p, len);
      else
        unpruned[len].insert(behaviour(p));
      int i = len - 1;
      while (i >= 0 && ++idx[i] == static_cast<int>(pool.size())) idx[i--] = 0;
      if (i < 0) break;
    }
  }
  REQUIRE(pruned.size() > 100);
  for (auto& [p, len] : pruned) {
    std::string sig = behaviour(p);
    bool covered = false;
    for (int l = 0; l <= len && !covered; ++l) covered = unpruned[l].count(sig) > 0;
    CHECK_MESSAGE(covered, disassemble(p, dict()));
  }
}

TEST_CASE("pruning does not change the found program when it survives pruning") {
  TestSuite s = oracle::unary_suite("SQUARE", oracle::sample_domain(-1000, 1000, 20, 5),
                                    [](Value x) { return oracle::mul(x, x); });
  SearchAlphabet a = alpha({"DUP", "SWAP", "*", "+"});
  EnumConfig cfg;
  cfg.max_len = 3;
  SearchResult with = enumerate_programs(s, dict(), a, ForbiddenPairs::defaults(dict()),
                                         ExecLimits{}, cfg);
  SearchResult without =
      enumerate_programs(s, dict(), a, ForbiddenPairs::none(), ExecLimits{}, cfg);
  REQUIRE(with.found.has_value());
  REQUIRE(without.found.has_value());
  CHECK(with.found->bytes == without.found->bytes);
}

TEST_CASE("reports are identical regardless of worker count") {
  TestSuite s = oracle::unary_suite("CUBE", oracle::sample_domain(-300, 300, 16, 6),
                                    [](Value x) { return oracle::mul(x, oracle::mul(x, x)); });
  SearchAlphabet a = alpha({"DUP", "OVER", "SWAP", "*", "+", "IF"});
  SearchResult r1 = search(s, a, 4, 1);
  SearchResult r2 = search(s, a, 4, 3);
  CHECK(r1.found.has_value() == r2.found.has_value());
  if (r1.found) CHECK(r1.found->bytes == r2.found->bytes);
  CHECK(r1.histogram.counts == r2.histogram.counts);
  CHECK(r1.counters.generated == r2.counters.generated);
  CHECK(r1.counters.evaluated == r2.counters.evaluated);
  auto e1 = r1.partials.entries();
  auto e2 = r2.partials.entries();
  REQUIRE(e1.size() == e2.size());
  for (std::size_t i = 0; i < e1.size(); ++i) {
    CHECK(e1[i].prog == e2[i].prog);
    CHECK(e1[i].pass_count == e2[i].pass_count);
  }
}

TEST_CASE("attempt budgets stop the search") {
  TestSuite s = oracle::unary_suite("NOPE", oracle::sample_domain(-1000, 1000, 10, 7),
                                    [](Value x) { return oracle::mul(x, 2654435761); });
  SearchResult r = search(s, default_search_alphabet(dict()), 6, 1, Budget::attempts(20000));
  CHECK(r.counters.budget_hit);
  CHECK(r.counters.generated >= 20000);
  CHECK(r.counters.generated < 20000 + 100000);
}

TEST_CASE("histogram report format") {
  PassHistogram h;
  h.add(0, 12);
  h.add(1, 3);
  CHECK(histogram_report(h) == "0: 12\n1: 3\n");
  CHECK(histogram_report(PassHistogram{}) == "");
}

TEST_CASE("partials report and parse round trip") {
  PartialProgramList pl(10);
  pl.insert(assemble_body("DUP CONST 3 * +", dict()), 3);
  pl.insert(assemble_body("DUP * DUP +", dict()), 3);
  pl.insert(assemble_body("DUP *", dict()), 4);
  std::string text = partials_report(pl, dict());
  CHECK(text.find("4 : DUP * ;") == 0);

  PassHistogram h;
  h.add(0, 245594772);
  h.add(1, 508224);
  std::string report = histogram_report(h) + text;
  ParsedReport parsed = parse_report(report, dict());
  CHECK(parsed.histogram.counts[0] == 245594772);
  CHECK(parsed.histogram.counts[1] == 508224);
  REQUIRE(parsed.partials.size() == 3);
  CHECK(parsed.partials[0].pass_count == 4);
  CHECK(parsed.partials[0].prog == assemble_body("DUP *", dict()));
}

TEST_CASE("the partial list keeps the best entries and rejects duplicates") {
  PartialProgramList pl(3);
  Program a = assemble_body("DUP", dict());
  Program b = assemble_body("SWAP", dict());
  Program c = assemble_body("OVER", dict());
  Program d = assemble_body("ROT OVER", dict());
  CHECK(pl.insert(a, 2));
  CHECK_FALSE(pl.insert(a, 2));  // duplicate
  CHECK(pl.insert(b, 5));
  CHECK(pl.insert(c, 1));
  CHECK_FALSE(pl.insert(d, 0));  // zero passes never enter
  CHECK(pl.insert(d, 4));        // evicts the worst (c)
  auto e = pl.entries();
  REQUIRE(e.size() == 3);
  CHECK(e[0].pass_count == 5);
  CHECK(e[1].pass_count == 4);
  CHECK(e[2].pass_count == 2);
  CHECK(pl.best_pass() == 5);
  CHECK(pl.worst_pass() == 2);

  // ties evict the longer, then lexicographically larger program
  PartialProgramList tie(2);
  tie.insert(assemble_body("ROT OVER", dict()), 1);
  tie.insert(assemble_body("SWAP", dict()), 1);
  tie.insert(assemble_body("DUP", dict()), 1);
  auto t = tie.entries();
  REQUIRE(t.size() == 2);
  CHECK(disassemble(t[0].prog, dict()) == "DUP");
  CHECK(disassemble(t[1].prog, dict()) == "SWAP");
}
