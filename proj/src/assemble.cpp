#include "gene/assemble.hpp"

#include <charconv>

namespace gene {
namespace {

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\r' &&
           text[j] != '\n')
      ++j;
    out.push_back({std::string(text.substr(i, j - i)), line});
    i = j;
  }
  return out;
}

bool parse_int(const std::string& s, int& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

// Compiles tokens[pos..] until `end_tok` (exclusive) or end of input.
Program compile_tokens(const std::vector<Token>& toks, std::size_t& pos, const char* end_tok,
                       const Dictionary& dict) {
  Program prog;
  while (pos < toks.size() && (!end_tok || toks[pos].text != end_tok)) {
    const Token& t = toks[pos];
    const Word* w = dict.find(t.text);
    if (!w) throw ParseError(t.line, "unknown word: " + t.text);
    prog.bytes.push_back(w->code);
    ++pos;
    if (builtin_code(w->code) && operand_code(w->code)) {
      if (pos >= toks.size() || (end_tok && toks[pos].text == end_tok))
        throw ParseError(t.line, t.text + " needs an operand");
      int v;
      if (!parse_int(toks[pos].text, v))
        throw ParseError(toks[pos].line, "bad operand: " + toks[pos].text);
      if (v < -128 || v > 127)
        throw ParseError(toks[pos].line, "operand out of range -128..127: " + toks[pos].text);
      if (v == 0 && jump_code(w->code))
        throw ParseError(toks[pos].line, "zero jump offset");
      prog.bytes.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(v)));
      ++pos;
    }
  }
  prog.bytes.push_back(code_of(Op::End));
  return prog;
}

}  // namespace

std::vector<std::uint8_t> assemble(std::string_view text, Dictionary& dict,
                                   bool tolerate_invalid) {
  std::vector<std::uint8_t> added;
  std::vector<Token> toks = tokenize(text);
  std::size_t pos = 0;
  while (pos < toks.size()) {
    if (toks[pos].text != ":")
      throw ParseError(toks[pos].line, "expected ':', got " + toks[pos].text);
    ++pos;
    if (pos >= toks.size()) throw ParseError(toks.back().line, "missing word name after ':'");
    Token name = toks[pos];
    if (name.text == ":" || name.text == ";")
      throw ParseError(name.line, "bad word name: " + name.text);
    ++pos;
    std::size_t body_start = pos;
    Program body = compile_tokens(toks, pos, ";", dict);
    if (pos >= toks.size())
      throw ParseError(toks.empty() ? 1 : toks.back().line, "missing ';' for " + name.text);
    ++pos;  // consume ';'
    if (body.size() == 1) throw ParseError(name.line, "empty body for " + name.text);

    StackEffect eff = static_analyze(body, dict);
    if (!eff.valid && !tolerate_invalid)
      throw ParseError(toks[body_start].line,
                       "invalid signature for " + name.text + ": " + eff.error);
    try {
      added.push_back(dict.add_word(name.text, std::move(body), eff.consumed, eff.produced,
                                    eff.valid));
    } catch (const DictError& e) {
      throw ParseError(name.line, e.what());
    }
  }
  return added;
}

Program assemble_body(std::string_view tokens, const Dictionary& dict) {
  std::vector<Token> toks = tokenize(tokens);
  std::size_t pos = 0;
  Program p = compile_tokens(toks, pos, nullptr, dict);
  return p;
}

std::string disassemble(const Program& program, const Dictionary& dict) {
  DecodeResult dec = decode(program, dict);
  if (!dec.ok) throw std::runtime_error("disassemble: " + dec.error);
  std::string out;
  for (const Instr& in : dec.instrs) {
    if (in.code == code_of(Op::End)) break;
    if (!out.empty()) out += ' ';
    out += dict.at(in.code).name;
    if (in.size == 2) {
      out += ' ';
      out += std::to_string(static_cast<int>(in.operand));
    }
  }
  return out;
}

std::string dump_dictionary(const Dictionary& dict) {
  std::string out;
  for (const Word& w : dict.words()) {
    if (w.builtin()) continue;
    out += ": " + w.name + " " + disassemble(w.body, dict) + " ;\n";
  }
  return out;
}

}  // namespace gene
