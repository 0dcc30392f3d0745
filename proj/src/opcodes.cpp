#include "gene/opcodes.hpp"

namespace gene {
namespace {

// name, has_operand, is_static, consumed, produced
constexpr OpInfo kTable[kBuiltinCount] = {
    {"END", false, true, 0, 0},
    {"GOTO", true, true, 0, 0},
    {"IF", true, true, 1, 0},
    {"CONST", true, true, 0, 1},
    {"DUP", false, true, 1, 2},
    {"DROP", false, true, 1, 0},
    {"SWAP", false, true, 2, 2},
    {"OVER", false, true, 2, 3},
    {"ROT", false, true, 3, 3},
    {"-ROT", false, true, 3, 3},
    {"PICK", false, false, 0, 0},
    {"ROLL", false, false, 0, 0},
    {"2PICK", false, true, 3, 4},
    {"3PICK", false, true, 4, 5},
    {"4PICK", false, true, 5, 6},
    {"3ROLL", false, true, 4, 4},
    {"4ROLL", false, true, 5, 5},
    {"NEG", false, true, 1, 1},
    {"+", false, true, 2, 1},
    {"-", false, true, 2, 1},
    {"*", false, true, 2, 1},
    {"/", false, true, 2, 1},
    {"%", false, true, 2, 1},
    {"/%", false, true, 2, 2},
    {"++", false, true, 1, 1},
    {"--", false, true, 1, 1},
    {"AND", false, true, 2, 1},
    {"OR", false, true, 2, 1},
    {"XOR", false, true, 2, 1},
    {"NOT", false, true, 1, 1},
    {">", false, true, 2, 1},
    {"<", false, true, 2, 1},
    {"=", false, true, 2, 1},
    {"0=", false, true, 1, 1},
    {"0<", false, true, 1, 1},
    {"0>", false, true, 1, 1},
    {"ZERO", false, true, 0, 1},
};

}  // namespace

const OpInfo& op_info(std::uint8_t code) { return kTable[code]; }

}  // namespace gene
