#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>

#include "gene/enumerate.hpp"

namespace gene {

// Word and word-pair occurrence counts over a set of programs, plus the
// observed CONST operand values. Anything never seen still gets the fixed
// floor probability 1/1024 before normalization.
struct FrequencyModel {
  static constexpr double kFloor = 1.0 / 1024.0;

  std::array<std::uint64_t, 256> unigram{};
  std::uint64_t uni_total = 0;
  std::vector<std::uint32_t> bigram;  // 256 x 256, row = predecessor
  std::array<std::uint64_t, 256> row_total{};
  std::map<int, std::uint64_t> const_counts;

  FrequencyModel() : bigram(256 * 256, 0) {}

  void add_program(const Program& prog, const Dictionary& dict);

  // Pre-normalization probability: relative frequency when seen, 1/1024 when not.
  double uni_raw(std::uint8_t code) const {
    return unigram[code] ? static_cast<double>(unigram[code]) / static_cast<double>(uni_total)
                         : kFloor;
  }
  double bi_raw(std::uint8_t prev, std::uint8_t code) const {
    std::uint32_t c = bigram[(static_cast<std::size_t>(prev) << 8) | code];
    return c ? static_cast<double>(c) / static_cast<double>(row_total[prev]) : kFloor;
  }
};

FrequencyModel build_model(const PartialProgramList& partials, const Dictionary& dict);
FrequencyModel build_model(const std::vector<Program>& programs, const Dictionary& dict);

// Text dump: `WORD count` unigram lines, `WORD WORD count` pair lines and
// `CONST <value> <count>` operand lines. Reloadable.
std::string dump_model(const FrequencyModel& model, const Dictionary& dict);
FrequencyModel parse_model(std::string_view text, const Dictionary& dict);

enum class GenMode { Unigram, Markov };

struct GenConfig {
  int lmin = 1;
  int lmax = 1;
  GenMode mode = GenMode::Unigram;
};

struct Sample {
  Program prog;
  int consumed = 0;
  int produced = 0;
};

// Draws programs from a model restricted to an alphabet. Instruction
// distributions are the floored, normalized model rows; CONST operands come
// from the observed values floored over the alphabet's operand pool; IF/GOTO
// offsets are uniform over the boundary-landing choices. A draw that violates
// the forbidden pairs or fails static analysis is one failed attempt.
class Sampler {
 public:
  Sampler(const FrequencyModel& model, const SearchAlphabet& alphabet,
          const ForbiddenPairs& forbidden, const Dictionary& dict);
  ~Sampler();
  Sampler(Sampler&&) noexcept;

  std::optional<Sample> try_sample(Rng& rng, const GenConfig& cfg);

  // Normalized probability of drawing `code` (prev_code < 0 selects the
  // unigram distribution; otherwise the bigram row of prev_code).
  double instr_prob(GenMode mode, int prev_code, std::uint8_t code) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// The proposition quantities: epsilon = product of the per-instruction draw
// probabilities under `mode`, N = round(1/epsilon), half away from zero.
struct HitEstimate {
  double epsilon = 0.0;
  std::uint64_t n = 0;
};
HitEstimate program_probability(const FrequencyModel& model, const SearchAlphabet& alphabet,
                                const ForbiddenPairs& forbidden, const Dictionary& dict,
                                const Program& program, GenMode mode);

struct GenerateResult {
  PartialProgramList partials{400};
  PassHistogram histogram;
  std::optional<Program> found;
  SearchCounters counters;
};

// One model-driven generation round: draw, check, evaluate, collect partials.
// Bit-reproducible for a fixed seed at one worker and an attempt budget.
GenerateResult generate_programs(const TestSuite& suite, const Dictionary& dict,
                                 const SearchAlphabet& alphabet, const ForbiddenPairs& forbidden,
                                 const ExecLimits& limits, const FrequencyModel& model,
                                 GenMode mode, int lmin, int lmax, Budget budget,
                                 std::uint64_t seed, int np, int workers);

struct BaseStepConfig {
  int l0 = 7;
  int l1 = 14;
  Budget gen_budget = Budget::seconds(400);  // total over all cycles
  Budget enum_budget{};                      // optional cap on the exhaustive phase
  int cycles = 8;
  int np = 400;
  int workers = 1;
  std::uint64_t seed = 1;
};

struct BaseStepResult {
  PartialProgramList partials;
  FrequencyModel model;
  std::optional<Program> found;
  PassHistogram histogram;
  SearchCounters counters;
};

// Exhaustive search to length l0, then `cycles` generation rounds of lengths
// l0+1..l1 alternating unigram and Markov modes, rebuilding the frequency
// tables after every round. Stops early on a full pass.
BaseStepResult base_step(const TestSuite& suite, const Dictionary& dict,
                         const SearchAlphabet& alphabet, const ForbiddenPairs& forbidden,
                         const ExecLimits& limits, const BaseStepConfig& cfg);

}  // namespace gene
