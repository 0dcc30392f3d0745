#include "gene/program.hpp"

#include "gene/dictionary.hpp"

namespace gene {

DecodeResult decode(const Program& program, const Dictionary& dict) {
  DecodeResult r;
  const auto& b = program.bytes;
  if (b.empty()) {
    r.error = "empty program";
    return r;
  }
  std::size_t pos = 0;
  while (pos < b.size()) {
    std::uint8_t code = b[pos];
    if (code == code_of(Op::End)) {
      if (pos + 1 != b.size()) {
        r.error = "END at offset " + std::to_string(pos) + " before final position";
        return r;
      }
      r.instrs.push_back({static_cast<std::int32_t>(pos), code, 0, 1});
      r.ok = true;
      return r;
    }
    if (!dict.has(code)) {
      r.error = "unknown opcode byte " + std::to_string(code) + " at offset " + std::to_string(pos);
      return r;
    }
    if (builtin_code(code) && operand_code(code)) {
      if (pos + 1 >= b.size()) {
        r.error = "missing operand byte at offset " + std::to_string(pos);
        return r;
      }
      r.instrs.push_back(
          {static_cast<std::int32_t>(pos), code, static_cast<std::int8_t>(b[pos + 1]), 2});
      pos += 2;
    } else {
      r.instrs.push_back({static_cast<std::int32_t>(pos), code, 0, 1});
      pos += 1;
    }
  }
  r.error = "missing terminating END";
  return r;
}

JumpCheck validate_jumps(const std::vector<Instr>& instrs, std::size_t program_len) {
  // Boundary bitmap over [0, len].
  std::vector<bool> boundary(program_len + 1, false);
  boundary[program_len] = true;
  for (const Instr& in : instrs) boundary[in.offset] = true;

  for (const Instr& in : instrs) {
    if (!jump_code(in.code)) continue;
    if (in.operand == 0)
      return {false, "zero jump offset at " + std::to_string(in.offset)};
    std::int32_t t = jump_target(in.offset + 1, in.operand);
    if (t < 0 || t > static_cast<std::int32_t>(program_len) || !boundary[t])
      return {false, "jump at " + std::to_string(in.offset) + " targets non-boundary " +
                         std::to_string(t)};
  }
  return {true, ""};
}

}  // namespace gene
