#include "gene/dictionary.hpp"

namespace gene {

Dictionary Dictionary::builtins() {
  Dictionary d;
  d.words_.reserve(kBuiltinCount);
  for (int code = 0; code < kBuiltinCount; ++code) {
    const OpInfo& info = op_info(static_cast<std::uint8_t>(code));
    Word w;
    w.name = std::string(info.name);
    w.code = static_cast<std::uint8_t>(code);
    w.consumed = info.consumed;
    w.produced = info.produced;
    w.static_ok = info.is_static;
    d.words_.push_back(std::move(w));
    d.by_name_.emplace(std::string(info.name), static_cast<std::uint8_t>(code));
  }
  // NEGATE and NEG name the same opcode.
  d.by_name_.emplace("NEGATE", code_of(Op::Neg));
  return d;
}

const Word* Dictionary::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return nullptr;
  return &words_[it->second];
}

std::uint8_t Dictionary::add_word(std::string name, Program body, int consumed, int produced,
                                  bool static_ok) {
  if (words_.size() >= 256) throw DictError("dictionary full: 256 opcodes in use");
  if (by_name_.count(name)) throw DictError("duplicate word name: " + name);
  if (body.empty()) throw DictError("user word must have a body: " + name);
  std::uint8_t code = static_cast<std::uint8_t>(words_.size());
  Word w;
  w.name = name;
  w.code = code;
  w.consumed = consumed;
  w.produced = produced;
  w.static_ok = static_ok;
  w.body = std::move(body);
  words_.push_back(std::move(w));
  by_name_.emplace(std::move(name), code);
  return code;
}

void Dictionary::remove_last_word() {
  if (words_.size() <= static_cast<std::size_t>(kBuiltinCount))
    throw DictError("no user words to remove");
  by_name_.erase(words_.back().name);
  words_.pop_back();
}

}  // namespace gene
