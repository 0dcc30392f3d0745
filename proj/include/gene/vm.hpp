#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gene/common.hpp"
#include "gene/dictionary.hpp"
#include "gene/program.hpp"

namespace gene {

struct ExecLimits {
  int max_steps = 10000;
  int max_stack = 256;
  int max_call_depth = 64;
};

enum class Fault : std::uint8_t {
  None = 0,
  StackUnderflow,
  StackOverflow,
  DivByZero,
  StepLimit,
  CallDepth,
  BadJump,
};

const char* fault_name(Fault f);

struct ExecOutcome {
  bool halted = false;
  Fault fault = Fault::None;
  std::vector<Value> stack;  // index 0 is the deepest element
  std::int64_t steps = 0;
};

// Records the offset of each executed instruction of the top-level program
// (word bodies are not traced). Capped at `cap` entries.
struct ExecTrace {
  std::vector<std::int32_t> offsets;
  std::size_t cap = 4096;
};

// Reusable interpreter; all buffers are preallocated so repeated runs do not
// allocate. A fault never throws: it is an ordinary outcome.
class Executor {
 public:
  static constexpr int kStackCap = 1024;
  static constexpr int kCallCap = 256;

  // Runs raw bytes against the dictionary. The caller guarantees the bytes
  // decode; jump targets are still bounds-checked (BadJump) so malformed
  // operands cannot escape the byte array.
  Fault run(const std::uint8_t* code, std::size_t len, const Dictionary& dict,
            std::span<const Value> inputs, const ExecLimits& limits, ExecTrace* trace = nullptr);

  std::span<const Value> stack() const { return {stack_.data(), static_cast<std::size_t>(sp_)}; }
  std::int64_t steps() const { return steps_; }

 private:
  std::array<Value, kStackCap> stack_{};
  struct Frame {
    const std::uint8_t* code;
    std::uint32_t len;
    std::uint32_t pc;
  };
  std::array<Frame, kCallCap> frames_{};
  int sp_ = 0;
  std::int64_t steps_ = 0;
};

// Decodes, validates jumps, pushes the inputs (first listed deepest) and runs.
ExecOutcome execute(const Program& program, const Dictionary& dict, std::span<const Value> inputs,
                    const ExecLimits& limits = {}, ExecTrace* trace = nullptr);

}  // namespace gene
