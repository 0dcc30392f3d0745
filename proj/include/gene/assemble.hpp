#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gene/analysis.hpp"
#include "gene/dictionary.hpp"

namespace gene {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_no, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

// Compiles a sequence of definitions `: NAME tok... ;` into the dictionary and
// returns the opcodes of the words added, in definition order. Lines starting
// with '#' are comments. CONST/GOTO/IF take a decimal operand token. Each body
// is statically analyzed; an invalid signature is an error unless
// `tolerate_invalid` is set, in which case the word is added with static_ok
// cleared.
std::vector<std::uint8_t> assemble(std::string_view text, Dictionary& dict,
                                   bool tolerate_invalid = false);

// Compiles a bare token sequence (no `:`/`;`) into an anonymous END-terminated
// program against the dictionary.
Program assemble_body(std::string_view tokens, const Dictionary& dict);

// Inverse of assemble_body: space-separated tokens, trailing END omitted.
// assemble_body(disassemble(p)) reproduces p byte for byte.
std::string disassemble(const Program& program, const Dictionary& dict);

// All user words as `: NAME body ;` lines, reloadable by assemble().
std::string dump_dictionary(const Dictionary& dict);

}  // namespace gene
