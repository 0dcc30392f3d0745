#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "gene/opcodes.hpp"

namespace gene {

class Dictionary;

// A program is a flat byte sequence of opcodes and operand bytes, terminated
// by a single END (0) byte.
struct Program {
  std::vector<std::uint8_t> bytes;

  auto operator<=>(const Program&) const = default;
  std::size_t size() const { return bytes.size(); }
  bool empty() const { return bytes.empty(); }
};

struct Instr {
  std::int32_t offset;
  std::uint8_t code;
  std::int8_t operand;  // meaningful only when the opcode carries one
  std::uint8_t size;    // 1 or 2 bytes
};

struct DecodeResult {
  bool ok = false;
  std::string error;
  std::vector<Instr> instrs;  // linear scan from offset 0, END included last
};

// Relative jumps resolve against the address of the operand byte.
inline std::int32_t jump_target(std::int32_t operand_addr, std::int8_t operand) {
  return operand_addr + operand;
}

// Linear decode. Fails on unknown opcode bytes, a truncated operand, a zero
// byte before the final position, or a missing terminating END.
DecodeResult decode(const Program& program, const Dictionary& dict);

// Checks every GOTO/IF against the instruction-boundary set: the operand is
// nonzero and the target lands on a boundary in [0, len], len meaning halt.
struct JumpCheck {
  bool ok = false;
  std::string error;
};
JumpCheck validate_jumps(const std::vector<Instr>& instrs, std::size_t program_len);

}  // namespace gene
