#include "doctest.h"
#include "gene/analysis.hpp"

#include <map>
#include <random>
#include <set>

#include "gene/assemble.hpp"
#include "gene/vm.hpp"

using namespace gene;

namespace {

const Dictionary& dict() {
  static Dictionary d = Dictionary::builtins();
  return d;
}

StackEffect analyze_text(const std::string& body) {
  return static_analyze(assemble_body(body, dict()), dict());
}

}  // namespace

TEST_CASE("signatures of straight-line programs") {
  StackEffect e = analyze_text("DUP *");
  CHECK(e.valid);
  CHECK(e.consumed == 1);
  CHECK(e.produced == 1);

  e = analyze_text("SWAP");
  CHECK(e.valid);
  CHECK(e.consumed == 2);
  CHECK(e.produced == 2);

  e = analyze_text("");
  CHECK(e.valid);
  CHECK(e.consumed == 0);
  CHECK(e.produced == 0);

  e = analyze_text("CONST 5");
  CHECK((e.valid && e.consumed == 0 && e.produced == 1));

  e = analyze_text("DUP * SWAP DUP * +");
  CHECK((e.valid && e.consumed == 2 && e.produced == 1));
}

TEST_CASE("loops with consistent depths are accepted") {
  StackEffect e = analyze_text("CONST 1 OVER -- -ROT * OVER IF -6 SWAP DROP");
  CHECK(e.valid);
  CHECK(e.consumed == 1);
  CHECK(e.produced == 1);
}

TEST_CASE("conflicting join depths are rejected with a witness") {
  // IF 2 jumps into the middle: the fallthrough path reaches the second DROP
  // one element deeper than the jump path.
  StackEffect e = analyze_text("IF 2 DROP DROP");
  CHECK_FALSE(e.valid);
  CHECK(e.reason == AnalysisFail::DepthConflict);
  CHECK(e.witness.offset == 3);
  CHECK(e.witness.depth_a != e.witness.depth_b);
}

TEST_CASE("growing loop is rejected") {
  StackEffect e = analyze_text("CONST 1 GOTO -3");
  CHECK_FALSE(e.valid);
  CHECK(e.reason == AnalysisFail::DepthConflict);
}

TEST_CASE("unreachable END is rejected") {
  StackEffect e = analyze_text("GOTO -1");
  CHECK_FALSE(e.valid);
  CHECK(e.reason == AnalysisFail::NoExit);
}

TEST_CASE("dynamic instructions have no static signature") {
  StackEffect e = analyze_text("PICK");
  CHECK_FALSE(e.valid);
  CHECK(e.reason == AnalysisFail::DynamicInstr);
}

TEST_CASE("jumps must land on instruction boundaries") {
  // target is the CONST operand byte
  Program p{{code_of(Op::Const), 5, code_of(Op::Goto), static_cast<std::uint8_t>(-2), 0}};
  StackEffect e = static_analyze(p, dict());
  CHECK_FALSE(e.valid);
  CHECK(e.reason == AnalysisFail::BadJump);
}

TEST_CASE("jump to one past END is an exit") {
  StackEffect e = analyze_text("DUP 0> IF 2 NEG");
  CHECK(e.valid);
  CHECK(e.consumed == 1);
  CHECK(e.produced == 1);

  // GOTO straight past the END byte
  e = analyze_text("CONST 3 GOTO 1");
  CHECK(e.valid);
  CHECK(e.produced == 1);
}

TEST_CASE("user word signatures feed the analysis") {
  Dictionary d = Dictionary::builtins();
  assemble(": SUMSQ2 DUP * SWAP DUP * + ;", d);
  StackEffect e = static_analyze(assemble_body("SUMSQ2 SUMSQ2", d), d);
  CHECK(e.valid);
  CHECK(e.consumed == 3);
  CHECK(e.produced == 1);
}

TEST_CASE("boundary depths are reported per offset") {
  StackEffect e = analyze_text("DUP *");
  REQUIRE(e.valid);
  REQUIRE(e.boundary_depth.size() == 4);
  CHECK(e.boundary_depth[0] == 0);
  CHECK(e.boundary_depth[1] == 1);
  CHECK(e.boundary_depth[2] == 0);
}

namespace {

// random programs over the static builtins, jumps landing on boundaries
Program random_program(std::mt19937& rng, int max_len) {
  static const std::vector<std::uint8_t> pool = [] {
    std::vector<std::uint8_t> v;
    for (int c = 1; c < kBuiltinCount; ++c) {
      Op op = static_cast<Op>(c);
      if (op == Op::Pick || op == Op::Roll) continue;
      v.push_back(static_cast<std::uint8_t>(c));
    }
    return v;
  }();
  int len = 1 + static_cast<int>(rng() % max_len);
  std::vector<std::uint8_t> codes, offs;
  int off = 0;
  for (int i = 0; i < len; ++i) {
    std::uint8_t c = pool[rng() % pool.size()];
    codes.push_back(c);
    offs.push_back(static_cast<std::uint8_t>(off));
    off += (builtin_code(c) && operand_code(c)) ? 2 : 1;
  }
  Program p;
  for (int i = 0; i < len; ++i) {
    p.bytes.push_back(codes[i]);
    if (!(builtin_code(codes[i]) && operand_code(codes[i]))) continue;
    if (jump_code(codes[i])) {
      int t = offs[rng() % offs.size()];
      int rel = t - (static_cast<int>(p.bytes.size()));
      if (rel == 0) rel = off - static_cast<int>(p.bytes.size());  // jump to END instead
      p.bytes.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(rel)));
    } else {
      p.bytes.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(1 + rng() % 11)));
    }
  }
  p.bytes.push_back(0);
  return p;
}

}  // namespace

TEST_CASE("accepted programs never underflow when given p inputs") {
  std::mt19937 rng(1234);
  int accepted = 0;
  for (int iter = 0; iter < 20000; ++iter) {
    Program p = random_program(rng, 6);
    StackEffect e = static_analyze(p, dict());
    if (!e.valid) continue;
    ++accepted;
    std::vector<Value> inputs;
    for (int i = 0; i < e.consumed; ++i)
      inputs.push_back(static_cast<Value>(rng() % 2001) - 1000);
    ExecOutcome out = execute(p, dict(), inputs);
    CHECK(out.fault != Fault::StackUnderflow);
    if (out.halted) CHECK(static_cast<int>(out.stack.size()) == e.produced);
  }
  CHECK(accepted > 100);
}

TEST_CASE("depth-conflict witnesses are confirmed by path enumeration") {
  // breadth-first reachable-depth sets, an oracle independent of the analyzer
  auto depth_sets = [](const Program& p) {
    DecodeResult dec = decode(p, dict());
    REQUIRE(dec.ok);
    std::map<int, std::set<int>> seen;
    std::vector<std::pair<int, int>> work{{0, 0}};
    seen[0].insert(0);
    auto push = [&](int off, int d) {
      if (static_cast<std::size_t>(seen[off].size()) > 8) return;  // cycles: cap growth
      if (seen[off].insert(d).second) work.push_back({off, d});
    };
    while (!work.empty()) {
      auto [off, d] = work.back();
      work.pop_back();
      const Instr* in = nullptr;
      for (const Instr& i : dec.instrs)
        if (i.offset == off) in = &i;
      if (!in || in->code == code_of(Op::End)) continue;
      const OpInfo& info = op_info(in->code);
      int da = d - info.consumed + info.produced;
      if (jump_code(in->code)) {
        int t = jump_target(off + 1, in->operand);
        if (t < static_cast<int>(p.size()) - 0) push(t == static_cast<int>(p.size()) ? -1 : t, da);
        if (in->code == code_of(Op::If)) push(off + in->size, da);
      } else {
        push(off + in->size, da);
      }
    }
    return seen;
  };

  std::mt19937 rng(77);
  int conflicts = 0;
  for (int iter = 0; iter < 20000 && conflicts < 200; ++iter) {
    Program p = random_program(rng, 6);
    StackEffect e = static_analyze(p, dict());
    if (e.valid || e.reason != AnalysisFail::DepthConflict) continue;
    if (e.witness.offset < 0 || e.witness.offset >= static_cast<int>(p.size())) continue;
    ++conflicts;
    auto sets = depth_sets(p);
    // both witness depths must be reachable at the witness offset
    const std::set<int>& s = sets[e.witness.offset];
    bool both = s.count(e.witness.depth_a) && s.count(e.witness.depth_b);
    CHECK(both);
  }
  CHECK(conflicts > 20);
}
