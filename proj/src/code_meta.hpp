// Internal: flat per-opcode tables and a no-allocation static analyzer for
// the search hot paths. Must agree with static_analyze(); a property test
// cross-checks the two.
#pragma once

#include <array>
#include <cstdint>

#include "gene/dictionary.hpp"
#include "gene/opcodes.hpp"

namespace gene::detail {

enum class CodeKind : std::uint8_t { Normal, Goto, If, End, Dynamic };

struct CodeMeta {
  std::array<std::int16_t, 256> consumed{};
  std::array<std::int16_t, 256> produced{};
  std::array<std::uint8_t, 256> size{};
  std::array<CodeKind, 256> kind{};

  static CodeMeta from(const Dictionary& dict) {
    CodeMeta m;
    for (std::size_t c = 0; c < dict.size(); ++c) {
      const Word& w = dict.at(static_cast<std::uint8_t>(c));
      m.size[c] = (builtin_code(w.code) && operand_code(w.code)) ? 2 : 1;
      m.consumed[c] = static_cast<std::int16_t>(w.consumed);
      m.produced[c] = static_cast<std::int16_t>(w.produced);
      if (w.code == code_of(Op::End))
        m.kind[c] = CodeKind::End;
      else if (w.code == code_of(Op::Goto))
        m.kind[c] = CodeKind::Goto;
      else if (w.code == code_of(Op::If))
        m.kind[c] = CodeKind::If;
      else if (!w.static_ok)
        m.kind[c] = CodeKind::Dynamic;
      else
        m.kind[c] = CodeKind::Normal;
    }
    return m;
  }
};

struct FastSig {
  bool valid = false;
  int p = 0;
  int q = 0;
};

// Depth propagation over a well-formed byte buffer (decodes cleanly, jumps on
// boundaries). Scratch buffers belong to the caller so repeated calls do not
// allocate.
class FastAnalyzer {
 public:
  static constexpr int kMaxBytes = 256;

  FastSig analyze(const std::uint8_t* bytes, int len, const CodeMeta& m) {
    ++epoch_;
    int shortfall = 0;
    bool exit_seen = false;
    int exit_depth = 0;
    int work_n = 0;
    auto arrive = [&](int off, int d) -> bool {
      if (off >= len) {  // jump past the final END: halt
        if (exit_seen && exit_depth != d) return false;
        exit_seen = true;
        exit_depth = d;
        return true;
      }
      if (seen_[off] == epoch_) return depth_[off] == d;
      seen_[off] = epoch_;
      depth_[off] = static_cast<std::int16_t>(d);
      work_[work_n++] = static_cast<std::int16_t>(off);
      return true;
    };
    if (!arrive(0, 0)) return {};
    while (work_n > 0) {
      int off = work_[--work_n];
      int d = depth_[off];
      std::uint8_t c = bytes[off];
      CodeKind k = m.kind[c];
      if (k == CodeKind::End) {
        if (exit_seen && exit_depth != d) return {};
        exit_seen = true;
        exit_depth = d;
        continue;
      }
      if (k == CodeKind::Dynamic) return {};
      int need = m.consumed[c];
      if (need - d > shortfall) shortfall = need - d;
      int da = d - need + m.produced[c];
      int fall = off + m.size[c];
      if (k == CodeKind::Goto) {
        if (!arrive(off + 1 + static_cast<std::int8_t>(bytes[off + 1]), da)) return {};
      } else if (k == CodeKind::If) {
        if (!arrive(off + 1 + static_cast<std::int8_t>(bytes[off + 1]), da)) return {};
        if (!arrive(fall, da)) return {};
      } else {
        if (!arrive(fall, da)) return {};
      }
    }
    if (!exit_seen) return {};
    return {true, shortfall, shortfall + exit_depth};
  }

 private:
  std::array<std::int16_t, kMaxBytes> depth_{};
  std::array<std::uint32_t, kMaxBytes> seen_{};
  std::array<std::int16_t, kMaxBytes> work_{};
  std::uint32_t epoch_ = 0;
};

}  // namespace gene::detail
