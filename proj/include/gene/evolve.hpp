#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gene/stochastic.hpp"

namespace gene {

// The dictionary plus the admissible-word subset programs are generated from.
struct Genome {
  Dictionary dict;
  SearchAlphabet alphabet;
};

// Default minimal base word list (11 words) and the remaining system words
// offered one at a time by the admissible-word selection.
std::vector<std::uint8_t> default_base_words();
std::vector<std::uint8_t> default_system_words();

struct QualityReport {
  int max_passed = 0;
  std::uint64_t passed_total = 0;
  std::uint64_t sample_size = 0;

  double avg() const {
    return sample_size ? static_cast<double>(passed_total) / static_cast<double>(sample_size) : 0.0;
  }
};

// Mean items passed over `sample_size` unigram draws; attempts rejected by the
// sampler count as zero-pass samples. max_passed also folds in `prior_best`.
QualityReport genome_quality(const Genome& genome, const TestSuite& suite,
                             const FrequencyModel& model, const ForbiddenPairs& forbidden,
                             std::uint64_t sample_size, int lmin, int lmax,
                             const ExecLimits& limits, std::uint64_t seed, int prior_best = 0);

// A gene is successful when the best pass count grew, or stayed equal while
// the average grew by at least one percent (exact rational comparison).
bool gene_success(const QualityReport& before, const QualityReport& after);

// An instruction chain: program bytes without the trailing END.
struct Chain {
  std::vector<std::uint8_t> bytes;
  auto operator<=>(const Chain&) const = default;
};

// The most frequent contiguous chains of 2-3 instructions over the partial
// programs, minus `unsuccessful` and chains already defined as words. Only
// chains that form a valid standalone body qualify. Ties prefer the shorter,
// then lexicographically smaller chain.
std::vector<Chain> extract_candidates(const PartialProgramList& partials,
                                      const std::set<Chain>& unsuccessful, std::size_t k,
                                      const Dictionary& dict);

struct Transcript {
  std::string text;
  void line(const std::string& s) { text += s + '\n'; }
};

struct AdmissibleConfig {
  BaseStepConfig step;
  std::uint64_t quality_sample = 10000;
};

struct AdmissibleResult {
  Genome genome;
  PartialProgramList partials{400};
  FrequencyModel model;
  QualityReport quality;
  std::optional<Program> found;
};

// Greedy add-one-word selection: starting from the base words, each system
// word is kept only if its base step makes the genome quality grow per
// gene_success.
AdmissibleResult select_admissible(const TestSuite& suite, const Dictionary& dict,
                                   const std::vector<std::uint8_t>& base_words,
                                   const std::vector<std::uint8_t>& system_words,
                                   const ForbiddenPairs& forbidden, const ExecLimits& limits,
                                   const AdmissibleConfig& cfg, Transcript* transcript = nullptr);

struct GeneLists {
  std::vector<Chain> candidates;
  std::set<Chain> unsuccessful;
  std::vector<std::string> accepted;
};

struct EvolveConfig {
  AdmissibleConfig admissible;
  BaseStepConfig gene_step;
  std::uint64_t quality_sample = 10000;
  std::size_t candidate_batch = 8;
  Budget total{};  // wall budget over the whole run
  std::uint64_t seed = 1;
  int retries = 0;
  // When set, skips the admissible-word selection and evolves over this
  // alphabet directly.
  std::optional<SearchAlphabet> fixed_alphabet;
};

struct EvolveResult {
  std::optional<Program> found;
  Genome genome;
  GeneLists genes;
  std::string transcript;
};

EvolveResult evolve(const TestSuite& suite, const Dictionary& builtins, const ExecLimits& limits,
                    const EvolveConfig& cfg);

// Recursively replaces user-word calls by their bodies, re-fixing the jumps
// that cross a splice point. The result has identical halting behaviour and
// final stack on every input.
struct InlineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
Program inline_genes(const Program& program, const Dictionary& dict);

// The selector suite S_P: same inputs, single output 1 where P passes the
// item and 0 where it does not.
TestSuite derive_selector_suite(const TestSuite& suite, const Program& p, const Dictionary& dict,
                                const ExecLimits& limits);

// Installs Q, P, R as words and emits the dispatcher `Q IF 4 R GOTO 2 P` so
// that items the selector maps to 1 run P and the rest run R. Fails when any
// part misses its contract.
struct ComposeError : std::runtime_error {
  std::vector<std::size_t> failing_items;
  ComposeError(const std::string& msg, std::vector<std::size_t> items)
      : std::runtime_error(msg), failing_items(std::move(items)) {}
};
Program compose_partition(const Program& q, const Program& p, const Program& r, Dictionary& dict,
                          const TestSuite& suite, const ExecLimits& limits);

}  // namespace gene
