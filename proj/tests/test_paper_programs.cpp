#include "doctest.h"
#include "paper_fixtures.hpp"

#include "gene/analysis.hpp"

using namespace gene;

TEST_CASE("reference programs pass their oracle suites in full") {
  for (const fixtures::TraceFixture& fx : fixtures::trace_fixtures()) {
    CAPTURE(fx.name);
    Dictionary d = Dictionary::builtins();
    if (!fx.dict_text.empty()) assemble(fx.dict_text, d);
    Program p = assemble_body(fx.body, d);
    TestSuite suite = fx.suite();
    REQUIRE(suite.items.size() >= 3);
    EvalReport rep = evaluate(p, d, suite);
    CHECK_MESSAGE(passes_all(rep, suite),
                  fx.name << ": " << rep.pass_count << "/" << suite.items.size());
  }
}

TEST_CASE("at least twenty in-domain checks per arithmetic fixture") {
  int big = 0;
  for (const fixtures::TraceFixture& fx : fixtures::trace_fixtures())
    if (fx.suite().items.size() >= 20) ++big;
  CHECK(big >= 15);
}

TEST_CASE("the right-shift partial passes exactly the nonzero-shift items") {
  Dictionary d = Dictionary::builtins();
  Program p = assemble_body(fixtures::kShiftrPartial, d);
  TestSuite s = fixtures::shiftr_suite();
  EvalReport rep = evaluate(p, d, s);
  CHECK(rep.pass_count == 9);
  for (std::size_t i = 0; i < s.items.size(); ++i)
    CHECK(rep.passed(i) == (s.items[i].inputs[0] != 0));
}

TEST_CASE("the nonnegative gcd stage handles every nonnegative pair") {
  Dictionary d = Dictionary::builtins();
  assemble(
      ": GCD_0 DUP -ROT % DUP IF -5 DROP ;\n"
      ": GCD_1 OVER ROT IF 3 GOTO -5 GCD_0 ;\n",
      d);
  Program p = assemble_body("GCD_1", d);
  auto pairs = oracle::sample_pairs(0, 5000, 30, 70);
  pairs.emplace_back(0, 9);
  pairs.emplace_back(7, 0);
  std::vector<std::pair<std::vector<Value>, std::vector<Value>>> rows;
  for (auto [a, b] : pairs) {
    if (a == 0 && b == 0) b = 3;
    rows.push_back({{a, b}, {static_cast<Value>(oracle::gcd_ll(a, b))}});
  }
  TestSuite s = oracle::make_suite("GCD_1", std::move(rows));
  EvalReport rep = evaluate(p, d, s);
  CHECK(passes_all(rep, s));

  // mixed signs are out of this stage's reach
  TestSuite neg = oracle::make_suite("GCDNEG", {{{-4, 6}, {2}}, {{-9, -3}, {3}}});
  CHECK_FALSE(passes_all(evaluate(p, d, neg), neg));
}

TEST_CASE("fixture signatures match their suites") {
  for (const fixtures::TraceFixture& fx : fixtures::trace_fixtures()) {
    CAPTURE(fx.name);
    Dictionary d = Dictionary::builtins();
    if (!fx.dict_text.empty()) assemble(fx.dict_text, d);
    Program p = assemble_body(fx.body, d);
    TestSuite suite = fx.suite();
    StackEffect eff = static_analyze(p, d);
    REQUIRE(eff.valid);
    CHECK(eff.consumed == suite.m);
    CHECK(eff.produced == suite.n);
  }
}
