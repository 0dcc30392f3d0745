#pragma once

#include <bitset>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "gene/common.hpp"
#include "gene/testio.hpp"

namespace gene {

// The word set a search draws from (END excluded, appended implicitly) plus
// the CONST operand pool. IF/GOTO operands always range over all nonzero
// offsets that land on an instruction boundary of the candidate.
struct SearchAlphabet {
  std::vector<std::uint8_t> codes;
  std::vector<std::int8_t> const_values;

  bool has(std::uint8_t code) const;
};

std::vector<std::int8_t> default_const_values();

// The 33-word base set: every static built-in except END, ZERO and the
// dynamic PICK/ROLL.
SearchAlphabet default_search_alphabet(const Dictionary& dict);
SearchAlphabet alphabet_from_names(const std::vector<std::string>& names, const Dictionary& dict);

// Adjacent instruction pairs pruned as redundant, unless the second
// instruction of the pair is the target of some jump in the candidate.
class ForbiddenPairs {
 public:
  static ForbiddenPairs defaults(const Dictionary& dict);
  static ForbiddenPairs none() { return ForbiddenPairs{}; }

  void add(std::uint8_t first, std::uint8_t second) { set_[index(first, second)] = true; }
  bool contains(std::uint8_t first, std::uint8_t second) const {
    return set_[index(first, second)];
  }
  bool empty() const { return set_.none(); }

 private:
  static std::size_t index(std::uint8_t a, std::uint8_t b) {
    return (static_cast<std::size_t>(a) << 8) | b;
  }
  std::bitset<65536> set_;
};

struct PartialEntry {
  Program prog;
  int pass_count;
};

// The N_p best partial programs, ordered by pass count descending; ties keep
// the shorter then lexicographically smaller program. Duplicates rejected.
class PartialProgramList {
 public:
  explicit PartialProgramList(int capacity = 400) : cap_(capacity) {}

  bool insert(const Program& prog, int pass_count);
  void merge(const PartialProgramList& other);

  std::vector<PartialEntry> entries() const;  // best first
  std::size_t size() const { return set_.size(); }
  bool empty() const { return set_.empty(); }
  int capacity() const { return cap_; }
  int best_pass() const;
  int worst_pass() const;

 private:
  struct Key {
    int pass;
    Program prog;
    bool operator<(const Key& o) const {
      if (pass != o.pass) return pass > o.pass;
      if (prog.bytes.size() != o.prog.bytes.size()) return prog.bytes.size() < o.prog.bytes.size();
      return prog.bytes < o.prog.bytes;
    }
  };
  int cap_;
  std::set<Key> set_;
};

struct PassHistogram {
  std::vector<std::uint64_t> counts;

  void resize(std::size_t items) { counts.assign(items + 1, 0); }
  void add(std::size_t k, std::uint64_t n = 1) {
    if (k >= counts.size()) counts.resize(k + 1, 0);
    counts[k] += n;
  }
  void merge(const PassHistogram& o);
  std::uint64_t total() const;
};

// One `k: count` line per bucket, matching the report listing shape.
std::string histogram_report(const PassHistogram& h);
// One `<pass_count> : <body> ;` line per partial program, best first.
std::string partials_report(const PartialProgramList& partials, const Dictionary& dict);

struct ParsedReport {
  PassHistogram histogram;
  std::vector<PartialEntry> partials;
};
ParsedReport parse_report(std::string_view text, const Dictionary& dict);

// |alphabet|^length instruction-slot combinations (operand choices are
// accounted separately in the search counters). Saturates at uint64 max.
std::uint64_t count_space(std::uint64_t alphabet_size, int length);

struct SearchCounters {
  std::uint64_t generated = 0;  // candidates considered, including pruned
  std::uint64_t evaluated = 0;  // candidates run against the suite
  double seconds = 0.0;
  bool budget_hit = false;
};

struct EnumConfig {
  int max_len = 5;
  Budget budget{};  // unbounded by default
  int np = 400;
  int workers = 1;
};

struct SearchResult {
  PartialProgramList partials;
  PassHistogram histogram;
  std::optional<Program> found;
  SearchCounters counters;
  int completed_len = 0;
};

// Exhaustive search in length order, lexicographic within a length. A full
// pass stops the search once its length level is complete, so the result is
// independent of the worker count.
SearchResult enumerate_programs(const TestSuite& suite, const Dictionary& dict,
                                const SearchAlphabet& alphabet, const ForbiddenPairs& forbidden,
                                const ExecLimits& limits, const EnumConfig& cfg);

}  // namespace gene
