#pragma once

#include <cstdint>
#include <string_view>

namespace gene {

// Built-in instruction set. Code 0 is END; GOTO/IF/CONST carry a signed
// operand byte; everything else is a single byte.
enum class Op : std::uint8_t {
  End = 0,
  Goto = 1,
  If = 2,
  Const = 3,
  Dup,
  Drop,
  Swap,
  Over,
  Rot,
  RotDown,  // -ROT
  Pick,     // dynamic: depth taken from top of stack
  Roll,     // dynamic
  Pick2,
  Pick3,
  Pick4,
  Roll3,
  Roll4,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  DivMod,  // pushes remainder then quotient
  Inc,
  Dec,
  And,
  Or,
  Xor,
  Not,
  Gt,
  Lt,
  Eq,
  EqZ,
  LtZ,
  GtZ,
  Zero,
  Count_
};

inline constexpr int kBuiltinCount = static_cast<int>(Op::Count_);

struct OpInfo {
  std::string_view name;
  bool has_operand;  // GOTO/IF/CONST
  bool is_static;    // false for PICK/ROLL
  std::int8_t consumed;
  std::int8_t produced;
};

// Indexed by opcode; valid for codes < kBuiltinCount.
const OpInfo& op_info(std::uint8_t code);

constexpr bool builtin_code(std::uint8_t code) { return code < kBuiltinCount; }
constexpr bool jump_code(std::uint8_t code) {
  return code == static_cast<std::uint8_t>(Op::Goto) || code == static_cast<std::uint8_t>(Op::If);
}
constexpr bool operand_code(std::uint8_t code) {
  return code <= static_cast<std::uint8_t>(Op::Const) && code != static_cast<std::uint8_t>(Op::End);
}

constexpr std::uint8_t code_of(Op op) { return static_cast<std::uint8_t>(op); }

}  // namespace gene
