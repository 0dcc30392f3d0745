#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gene/assemble.hpp"
#include "gene/vm.hpp"

namespace gene {

struct TestItem {
  std::vector<Value> inputs;   // first listed is deepest on the stack
  std::vector<Value> outputs;  // same orientation
};

// All items of a suite share one (m, n) signature.
struct TestSuite {
  std::string name;
  std::string comment;
  std::vector<TestItem> items;
  int m = 0;
  int n = 0;
};

// Parses the `.tst` format:
//   #T NAME comment...
//   <in> ints </in><out> ints </out>
// Blank lines and later '#' lines are skipped; malformed lines raise
// ParseError with the line number.
TestSuite parse_test_file(std::string_view text);
std::string format_test_file(const TestSuite& suite);

TestSuite load_suite(const std::filesystem::path& path);
std::vector<TestSuite> load_suites_dir(const std::filesystem::path& dir);

struct EvalReport {
  std::vector<std::uint64_t> mask;  // bit i set iff item i passed
  int pass_count = 0;
  std::vector<Fault> faults;  // per item, Fault::None when halted

  bool passed(std::size_t i) const { return (mask[i >> 6] >> (i & 63)) & 1; }
};

// Runs the program against every item. Strict mode requires the static
// signature to equal (m, n) and the final stack to equal the outputs exactly;
// lenient mode only compares the top n values. Faults fail the item.
EvalReport evaluate(const Program& program, const Dictionary& dict, const TestSuite& suite,
                    const ExecLimits& limits = {}, bool strict = true, bool fast_path = true);

bool passes_all(const EvalReport& r, const TestSuite& suite);

// Evaluation core without per-call analysis, for search loops: the caller has
// already checked the signature (strict) or waived it (lenient).
int evaluate_prechecked(Executor& ex, const std::uint8_t* code, std::size_t len,
                        const Dictionary& dict, const TestSuite& suite, const ExecLimits& limits,
                        bool strict, std::vector<std::uint64_t>* mask_out = nullptr,
                        std::vector<Fault>* faults_out = nullptr);

}  // namespace gene
