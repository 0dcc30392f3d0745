#include "gene/analysis.hpp"

#include <algorithm>

namespace gene {

StackEffect static_analyze(const Program& program, const Dictionary& dict) {
  StackEffect eff;
  DecodeResult dec = decode(program, dict);
  if (!dec.ok) {
    eff.reason = AnalysisFail::Decode;
    eff.error = dec.error;
    return eff;
  }
  JumpCheck jc = validate_jumps(dec.instrs, program.size());
  if (!jc.ok) {
    eff.reason = AnalysisFail::BadJump;
    eff.error = jc.error;
    return eff;
  }

  const std::int32_t len = static_cast<std::int32_t>(program.size());
  // Map byte offset -> instruction index, for edge traversal.
  std::vector<int> instr_at(len, -1);
  for (std::size_t i = 0; i < dec.instrs.size(); ++i) instr_at[dec.instrs[i].offset] = static_cast<int>(i);

  eff.boundary_depth.assign(len + 1, StackEffect::kUnreached);
  int shortfall = 0;
  bool exit_seen = false;
  int exit_depth = 0;

  std::vector<std::int32_t> work;
  work.push_back(0);
  eff.boundary_depth[0] = 0;

  auto arrive = [&](std::int32_t offset, int depth) -> bool {
    int& d = eff.boundary_depth[offset];
    if (d == StackEffect::kUnreached) {
      d = depth;
      if (offset < len) work.push_back(offset);
      return true;
    }
    if (d != depth) {
      eff.reason = AnalysisFail::DepthConflict;
      eff.witness = {offset, d, depth};
      eff.error = "depth conflict at offset " + std::to_string(offset);
      return false;
    }
    return true;
  };

  auto arrive_exit = [&](std::int32_t offset, int depth) -> bool {
    if (exit_seen && exit_depth != depth) {
      // offset -1: the two depths belong to different exit points
      eff.reason = AnalysisFail::DepthConflict;
      eff.witness = {-1, exit_depth, depth};
      eff.error = "exit depth conflict at offset " + std::to_string(offset);
      return false;
    }
    exit_seen = true;
    exit_depth = depth;
    return true;
  };

  while (!work.empty()) {
    std::int32_t off = work.back();
    work.pop_back();
    const Instr& in = dec.instrs[instr_at[off]];
    int d = eff.boundary_depth[off];

    if (in.code == code_of(Op::End)) {
      if (!arrive_exit(off, d)) return eff;
      continue;
    }

    int c, r;
    if (builtin_code(in.code)) {
      const OpInfo& info = op_info(in.code);
      if (!info.is_static) {
        eff.reason = AnalysisFail::DynamicInstr;
        eff.error = std::string(info.name) + " has no static signature";
        return eff;
      }
      c = info.consumed;
      r = info.produced;
    } else {
      const Word& w = dict.at(in.code);
      if (!w.static_ok) {
        eff.reason = AnalysisFail::DynamicInstr;
        eff.error = "word " + w.name + " has no static signature";
        return eff;
      }
      c = w.consumed;
      r = w.produced;
    }
    shortfall = std::max(shortfall, c - d);
    int d_after = d - c + r;

    std::int32_t fall = off + in.size;
    if (in.code == code_of(Op::Goto)) {
      std::int32_t t = jump_target(off + 1, in.operand);
      if (t == len) {
        if (!arrive_exit(t, d_after)) return eff;
      } else if (!arrive(t, d_after)) {
        return eff;
      }
    } else if (in.code == code_of(Op::If)) {
      std::int32_t t = jump_target(off + 1, in.operand);
      if (t == len) {
        if (!arrive_exit(t, d_after)) return eff;
      } else if (!arrive(t, d_after)) {
        return eff;
      }
      if (!arrive(fall, d_after)) return eff;
    } else {
      if (!arrive(fall, d_after)) return eff;
    }
  }

  if (!exit_seen) {
    eff.reason = AnalysisFail::NoExit;
    eff.error = "END unreachable";
    return eff;
  }

  eff.valid = true;
  eff.consumed = shortfall;
  eff.produced = shortfall + exit_depth;
  return eff;
}

}  // namespace gene
