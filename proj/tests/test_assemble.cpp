#include "doctest.h"
#include "gene/assemble.hpp"

#include <random>

#include "gene/vm.hpp"

using namespace gene;

TEST_CASE("definitions compile with analyzed signatures") {
  Dictionary d = Dictionary::builtins();
  std::vector<std::uint8_t> added = assemble(": SUMSQ2 DUP * SWAP DUP * + ;", d);
  REQUIRE(added.size() == 1);
  const Word& w = d.at(added[0]);
  CHECK(w.name == "SUMSQ2");
  CHECK(w.consumed == 2);
  CHECK(w.produced == 1);
  CHECK(w.code == kBuiltinCount);

  assemble(": C10 CONST 10 ;", d);
  const Word* c10 = d.find("C10");
  REQUIRE(c10);
  CHECK(c10->consumed == 0);
  CHECK(c10->produced == 1);
}

TEST_CASE("multiple definitions and comments") {
  Dictionary d = Dictionary::builtins();
  std::string text =
      "# dictionary file\n"
      ": ABS DUP 0> IF 2 NEG ;\n"
      "# uses ABS\n"
      ": DIST - ABS ;\n";
  assemble(text, d);
  CHECK(d.find("ABS"));
  CHECK(d.find("DIST"));
  ExecOutcome out = execute(assemble_body("DIST", d), d, std::vector<Value>{3, 10});
  CHECK(out.stack == std::vector<Value>{7});
}

TEST_CASE("parse errors carry line numbers") {
  Dictionary d = Dictionary::builtins();
  CHECK_THROWS_AS(assemble(": BAD SWAP SWAP", d), ParseError);
  CHECK_THROWS_AS(assemble(": X NOSUCHWORD ;", d), ParseError);
  CHECK_THROWS_AS(assemble(": X CONST 400 ;", d), ParseError);
  CHECK_THROWS_AS(assemble(": X GOTO 0 ;", d), ParseError);
  CHECK_THROWS_AS(assemble(": X CONST ;", d), ParseError);
  CHECK_THROWS_AS(assemble("DUP *", d), ParseError);  // missing ':'
  assemble(": DBL DUP + ;", d);
  CHECK_THROWS_AS(assemble(": DBL DUP + ;", d), ParseError);  // duplicate

  try {
    assemble("\n\n: X NOSUCHWORD ;", d);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("no forward references, so no recursion") {
  Dictionary d = Dictionary::builtins();
  CHECK_THROWS_AS(assemble(": REC DUP REC ;", d), ParseError);
}

TEST_CASE("invalid signatures are rejected unless tolerated") {
  Dictionary d = Dictionary::builtins();
  CHECK_THROWS_AS(assemble(": LOOP GOTO -1 ;", d), ParseError);
  assemble(": LOOP GOTO -1 ;", d, /*tolerate_invalid=*/true);
  const Word* w = d.find("LOOP");
  REQUIRE(w);
  CHECK_FALSE(w->static_ok);
  // a word without a static signature poisons analysis but still executes
  StackEffect e = static_analyze(assemble_body("LOOP", d), d);
  CHECK_FALSE(e.valid);
}

TEST_CASE("disassemble prints the worked factorial text") {
  Dictionary d = Dictionary::builtins();
  Program p = assemble_body("CONST 1 OVER -- -ROT * OVER IF -6 SWAP DROP", d);
  CHECK(disassemble(p, d) == "CONST 1 OVER -- -ROT * OVER IF -6 SWAP DROP");
  CHECK(disassemble(Program{{0}}, d) == "");
  CHECK(disassemble(assemble_body("NEGATE", d), d) == "NEG");
}

TEST_CASE("round trip: disassemble then assemble is the identity") {
  Dictionary d = Dictionary::builtins();
  assemble(": SQ DUP * ;", d);
  std::mt19937 rng(99);
  std::vector<std::uint8_t> pool;
  for (int c = 1; c < static_cast<int>(d.size()); ++c) {
    Op op = static_cast<Op>(c);
    if (op == Op::Pick || op == Op::Roll) pool.push_back(static_cast<std::uint8_t>(c));
    pool.push_back(static_cast<std::uint8_t>(c));
  }
  int checked = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    int len = 1 + static_cast<int>(rng() % 8);
    std::vector<std::uint8_t> codes;
    std::vector<int> offs;
    int off = 0;
    for (int i = 0; i < len; ++i) {
      std::uint8_t c = pool[rng() % pool.size()];
      codes.push_back(c);
      offs.push_back(off);
      off += (builtin_code(c) && operand_code(c)) ? 2 : 1;
    }
    Program p;
    bool ok = true;
    for (int i = 0; i < len; ++i) {
      p.bytes.push_back(codes[i]);
      if (!(builtin_code(codes[i]) && operand_code(codes[i]))) continue;
      if (jump_code(codes[i])) {
        int t = (rng() % 2) ? off : offs[rng() % offs.size()];
        int rel = t - static_cast<int>(p.bytes.size());
        if (rel == 0 || rel < -128 || rel > 127) {
          ok = false;
          break;
        }
        p.bytes.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(rel)));
      } else {
        p.bytes.push_back(static_cast<std::uint8_t>(
            static_cast<std::int8_t>(static_cast<int>(rng() % 255) - 127)));
      }
    }
    if (!ok) continue;
    p.bytes.push_back(0);
    ++checked;
    Program back = assemble_body(disassemble(p, d), d);
    CHECK(back.bytes == p.bytes);
  }
  CHECK(checked > 500);
}

TEST_CASE("dictionary dump reloads to the same words") {
  Dictionary d = Dictionary::builtins();
  assemble(": ABS DUP 0> IF 2 NEG ;\n: GCD_0 DUP -ROT % DUP IF -5 DROP ;", d);
  std::string dump = dump_dictionary(d);
  Dictionary d2 = Dictionary::builtins();
  assemble(dump, d2);
  REQUIRE(d2.size() == d.size());
  for (std::size_t i = kBuiltinCount; i < d.size(); ++i) {
    CHECK(d2.at(static_cast<std::uint8_t>(i)).name == d.at(static_cast<std::uint8_t>(i)).name);
    CHECK(d2.at(static_cast<std::uint8_t>(i)).body == d.at(static_cast<std::uint8_t>(i)).body);
  }
}

TEST_CASE("word names are arbitrary space-free strings") {
  Dictionary d = Dictionary::builtins();
  assemble(": x->x*2^y DUP + ;", d);
  CHECK(d.find("x->x*2^y"));
}
