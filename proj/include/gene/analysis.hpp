#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gene/dictionary.hpp"
#include "gene/program.hpp"

namespace gene {

enum class AnalysisFail : std::uint8_t {
  None = 0,
  Decode,
  BadJump,
  DynamicInstr,   // PICK/ROLL or a tolerated-invalid word
  DepthConflict,  // two control-flow paths reach one boundary at distinct depths
  NoExit,         // END unreachable from offset 0
};

// Two distinct relative depths observed at one instruction boundary.
struct DepthWitness {
  std::int32_t offset = -1;
  int depth_a = 0;
  int depth_b = 0;
};

struct StackEffect {
  bool valid = false;
  int consumed = 0;  // p: maximum shortfall against the entry stack
  int produced = 0;  // q: depth at END, relative to the p inputs
  AnalysisFail reason = AnalysisFail::None;
  std::string error;
  DepthWitness witness;
  // Relative depth at each reachable instruction boundary, indexed by byte
  // offset; kUnreached where no path arrives.
  std::vector<int> boundary_depth;
  static constexpr int kUnreached = INT32_MIN;
};

// Fixed-point depth propagation over fallthrough and jump edges. Valid iff
// every boundary is reached at a single depth, END is reached, and all exits
// agree; (p, q) is then the static signature of the program.
StackEffect static_analyze(const Program& program, const Dictionary& dict);

}  // namespace gene
