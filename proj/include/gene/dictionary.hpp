#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gene/program.hpp"

namespace gene {

// A dictionary entry: built-in words have an empty body; user words carry an
// END-terminated body and the statically determined signature of that body.
struct Word {
  std::string name;
  std::uint8_t code = 0;
  int consumed = 0;
  int produced = 0;
  bool static_ok = true;  // false for PICK/ROLL and tolerated-invalid words
  Program body;

  bool builtin() const { return body.empty(); }
};

struct DictError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ordered word set; opcode == index. User words may reference only words
// already present, so recursion is not expressible.
class Dictionary {
 public:
  // The full built-in set, END..ZERO, with NEGATE registered as an alias of NEG.
  static Dictionary builtins();

  const Word& at(std::uint8_t code) const { return words_[code]; }
  const Word* find(std::string_view name) const;
  bool has(std::uint8_t code) const { return code < words_.size(); }

  std::size_t size() const { return words_.size(); }
  int next_code() const { return static_cast<int>(words_.size()); }
  std::size_t user_word_count() const { return words_.size() - kBuiltinCount; }

  // Throws DictError on duplicate name or a full opcode space (256 codes).
  std::uint8_t add_word(std::string name, Program body, int consumed, int produced,
                        bool static_ok = true);

  void remove_last_word();

  const std::vector<Word>& words() const { return words_; }

 private:
  std::vector<Word> words_;
  std::unordered_map<std::string, std::uint8_t> by_name_;
};

}  // namespace gene
