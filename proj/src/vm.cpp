#include "gene/vm.hpp"

namespace gene {

const char* fault_name(Fault f) {
  switch (f) {
    case Fault::None: return "none";
    case Fault::StackUnderflow: return "stack-underflow";
    case Fault::StackOverflow: return "stack-overflow";
    case Fault::DivByZero: return "div-by-zero";
    case Fault::StepLimit: return "step-limit";
    case Fault::CallDepth: return "call-depth";
    case Fault::BadJump: return "bad-jump";
  }
  return "?";
}

Fault Executor::run(const std::uint8_t* code, std::size_t len, const Dictionary& dict,
                    std::span<const Value> inputs, const ExecLimits& limits, ExecTrace* trace) {
  const int max_stack = limits.max_stack < kStackCap ? limits.max_stack : kStackCap;
  if (inputs.size() > static_cast<std::size_t>(max_stack)) return Fault::StackOverflow;
  sp_ = 0;
  steps_ = 0;
  for (Value v : inputs) stack_[sp_++] = v;
  const int max_depth = limits.max_call_depth < kCallCap ? limits.max_call_depth : kCallCap;
  int fp = 0;  // frames in use below the current one

  const std::uint8_t* cur = code;
  std::uint32_t cur_len = static_cast<std::uint32_t>(len);
  std::uint32_t pc = 0;

  while (true) {
    if (pc >= cur_len) {
      // Jumping to len means halt (or return, inside a word body).
      if (fp == 0) return Fault::None;
      --fp;
      cur = frames_[fp].code;
      cur_len = frames_[fp].len;
      pc = frames_[fp].pc;
      continue;
    }
    if (steps_ >= limits.max_steps) return Fault::StepLimit;
    ++steps_;
    if (trace && fp == 0 && trace->offsets.size() < trace->cap)
      trace->offsets.push_back(static_cast<std::int32_t>(pc));

    const std::uint8_t op = cur[pc];
    switch (op) {
      case code_of(Op::End):
        if (fp == 0) return Fault::None;
        --fp;
        cur = frames_[fp].code;
        cur_len = frames_[fp].len;
        pc = frames_[fp].pc;
        continue;

      case code_of(Op::Goto): {
        std::int32_t t = jump_target(static_cast<std::int32_t>(pc) + 1,
                                     static_cast<std::int8_t>(cur[pc + 1]));
        if (t < 0 || t > static_cast<std::int32_t>(cur_len)) return Fault::BadJump;
        pc = static_cast<std::uint32_t>(t);
        continue;
      }

      case code_of(Op::If): {
        if (sp_ < 1) return Fault::StackUnderflow;
        Value flag = stack_[--sp_];
        if (flag != 0) {
          std::int32_t t = jump_target(static_cast<std::int32_t>(pc) + 1,
                                       static_cast<std::int8_t>(cur[pc + 1]));
          if (t < 0 || t > static_cast<std::int32_t>(cur_len)) return Fault::BadJump;
          pc = static_cast<std::uint32_t>(t);
        } else {
          pc += 2;
        }
        continue;
      }

      case code_of(Op::Const):
        if (sp_ >= max_stack) return Fault::StackOverflow;
        stack_[sp_++] = static_cast<Value>(static_cast<std::int8_t>(cur[pc + 1]));
        pc += 2;
        continue;

      case code_of(Op::Dup):
        if (sp_ < 1) return Fault::StackUnderflow;
        if (sp_ >= max_stack) return Fault::StackOverflow;
        stack_[sp_] = stack_[sp_ - 1];
        ++sp_;
        break;

      case code_of(Op::Drop):
        if (sp_ < 1) return Fault::StackUnderflow;
        --sp_;
        break;

      case code_of(Op::Swap): {
        if (sp_ < 2) return Fault::StackUnderflow;
        std::swap(stack_[sp_ - 1], stack_[sp_ - 2]);
        break;
      }

      case code_of(Op::Over):
        if (sp_ < 2) return Fault::StackUnderflow;
        if (sp_ >= max_stack) return Fault::StackOverflow;
        stack_[sp_] = stack_[sp_ - 2];
        ++sp_;
        break;

      case code_of(Op::Rot): {
        if (sp_ < 3) return Fault::StackUnderflow;
        Value a = stack_[sp_ - 3];
        stack_[sp_ - 3] = stack_[sp_ - 2];
        stack_[sp_ - 2] = stack_[sp_ - 1];
        stack_[sp_ - 1] = a;
        break;
      }

      case code_of(Op::RotDown): {
        if (sp_ < 3) return Fault::StackUnderflow;
        Value c = stack_[sp_ - 1];
        stack_[sp_ - 1] = stack_[sp_ - 2];
        stack_[sp_ - 2] = stack_[sp_ - 3];
        stack_[sp_ - 3] = c;
        break;
      }

      case code_of(Op::Pick): {
        if (sp_ < 1) return Fault::StackUnderflow;
        Value n = stack_[--sp_];
        if (n < 0 || n >= sp_) return Fault::StackUnderflow;
        if (sp_ >= max_stack) return Fault::StackOverflow;
        stack_[sp_] = stack_[sp_ - 1 - n];
        ++sp_;
        break;
      }

      case code_of(Op::Roll): {
        if (sp_ < 1) return Fault::StackUnderflow;
        Value n = stack_[--sp_];
        if (n < 0 || n >= sp_) return Fault::StackUnderflow;
        if (n > 0) {
          Value v = stack_[sp_ - 1 - n];
          for (int i = sp_ - 1 - n; i < sp_ - 1; ++i) stack_[i] = stack_[i + 1];
          stack_[sp_ - 1] = v;
        }
        break;
      }

      case code_of(Op::Pick2):
      case code_of(Op::Pick3):
      case code_of(Op::Pick4): {
        int n = 2 + (op - code_of(Op::Pick2));
        if (sp_ < n + 1) return Fault::StackUnderflow;
        if (sp_ >= max_stack) return Fault::StackOverflow;
        stack_[sp_] = stack_[sp_ - 1 - n];
        ++sp_;
        break;
      }

      case code_of(Op::Roll3):
      case code_of(Op::Roll4): {
        int n = 3 + (op - code_of(Op::Roll3));
        if (sp_ < n + 1) return Fault::StackUnderflow;
        Value v = stack_[sp_ - 1 - n];
        for (int i = sp_ - 1 - n; i < sp_ - 1; ++i) stack_[i] = stack_[i + 1];
        stack_[sp_ - 1] = v;
        break;
      }

      case code_of(Op::Neg):
        if (sp_ < 1) return Fault::StackUnderflow;
        stack_[sp_ - 1] = wrap_neg(stack_[sp_ - 1]);
        break;

      case code_of(Op::Add): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        stack_[sp_ - 1] = wrap_add(stack_[sp_ - 1], b);
        break;
      }

      case code_of(Op::Sub): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        stack_[sp_ - 1] = wrap_sub(stack_[sp_ - 1], b);
        break;
      }

      case code_of(Op::Mul): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        stack_[sp_ - 1] = wrap_mul(stack_[sp_ - 1], b);
        break;
      }

      case code_of(Op::Div): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        if (b == 0) return Fault::DivByZero;
        stack_[sp_ - 1] = wrap_div(stack_[sp_ - 1], b);
        break;
      }

      case code_of(Op::Mod): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        if (b == 0) return Fault::DivByZero;
        stack_[sp_ - 1] = wrap_mod(stack_[sp_ - 1], b);
        break;
      }

      case code_of(Op::DivMod): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[sp_ - 1];
        Value a = stack_[sp_ - 2];
        if (b == 0) return Fault::DivByZero;
        stack_[sp_ - 2] = wrap_mod(a, b);
        stack_[sp_ - 1] = wrap_div(a, b);
        break;
      }

      case code_of(Op::Inc):
        if (sp_ < 1) return Fault::StackUnderflow;
        stack_[sp_ - 1] = wrap_add(stack_[sp_ - 1], 1);
        break;

      case code_of(Op::Dec):
        if (sp_ < 1) return Fault::StackUnderflow;
        stack_[sp_ - 1] = wrap_sub(stack_[sp_ - 1], 1);
        break;

      case code_of(Op::And): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        stack_[sp_ - 1] &= b;
        break;
      }

      case code_of(Op::Or): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        stack_[sp_ - 1] |= b;
        break;
      }

      case code_of(Op::Xor): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        stack_[sp_ - 1] ^= b;
        break;
      }

      case code_of(Op::Not):
        if (sp_ < 1) return Fault::StackUnderflow;
        stack_[sp_ - 1] = ~stack_[sp_ - 1];
        break;

      case code_of(Op::Gt): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        stack_[sp_ - 1] = stack_[sp_ - 1] > b ? 1 : 0;
        break;
      }

      case code_of(Op::Lt): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        stack_[sp_ - 1] = stack_[sp_ - 1] < b ? 1 : 0;
        break;
      }

      case code_of(Op::Eq): {
        if (sp_ < 2) return Fault::StackUnderflow;
        Value b = stack_[--sp_];
        stack_[sp_ - 1] = stack_[sp_ - 1] == b ? 1 : 0;
        break;
      }

      case code_of(Op::EqZ):
        if (sp_ < 1) return Fault::StackUnderflow;
        stack_[sp_ - 1] = stack_[sp_ - 1] == 0 ? 1 : 0;
        break;

      case code_of(Op::LtZ):
        if (sp_ < 1) return Fault::StackUnderflow;
        stack_[sp_ - 1] = stack_[sp_ - 1] < 0 ? 1 : 0;
        break;

      case code_of(Op::GtZ):
        if (sp_ < 1) return Fault::StackUnderflow;
        stack_[sp_ - 1] = stack_[sp_ - 1] > 0 ? 1 : 0;
        break;

      case code_of(Op::Zero):
        if (sp_ >= max_stack) return Fault::StackOverflow;
        stack_[sp_++] = 0;
        break;

      default: {
        // User word: call its body on the shared stack.
        const Word& w = dict.at(op);
        if (fp >= max_depth) return Fault::CallDepth;
        frames_[fp].code = cur;
        frames_[fp].len = cur_len;
        frames_[fp].pc = pc + 1;
        ++fp;
        cur = w.body.bytes.data();
        cur_len = static_cast<std::uint32_t>(w.body.bytes.size());
        pc = 0;
        continue;
      }
    }
    ++pc;
  }
}

ExecOutcome execute(const Program& program, const Dictionary& dict, std::span<const Value> inputs,
                    const ExecLimits& limits, ExecTrace* trace) {
  ExecOutcome out;
  DecodeResult dec = decode(program, dict);
  if (dec.ok) {
    JumpCheck jc = validate_jumps(dec.instrs, program.size());
    if (!jc.ok) dec.ok = false;
  }
  if (!dec.ok) {
    out.fault = Fault::BadJump;
    return out;
  }
  Executor ex;
  Fault f = ex.run(program.bytes.data(), program.size(), dict, inputs, limits, trace);
  out.fault = f;
  out.halted = f == Fault::None;
  out.steps = ex.steps();
  auto st = ex.stack();
  out.stack.assign(st.begin(), st.end());
  return out;
}

}  // namespace gene
