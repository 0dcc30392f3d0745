#include "gene/testio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gene/analysis.hpp"

namespace gene {
namespace {

struct LineScanner {
  std::string_view s;
  std::size_t pos = 0;
  int line;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= s.size();
  }

  void expect(std::string_view tag) {
    skip_ws();
    if (s.substr(pos, tag.size()) != tag)
      throw ParseError(line, "expected " + std::string(tag));
    pos += tag.size();
  }

  bool peek(std::string_view tag) {
    skip_ws();
    return s.substr(pos, tag.size()) == tag;
  }

  Value next_int() {
    skip_ws();
    std::size_t j = pos;
    if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
    while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + j, v);
    if (ec != std::errc() || p != s.data() + j || j == pos)
      throw ParseError(line, "expected integer");
    if (v < INT32_MIN || v > INT32_MAX)
      throw ParseError(line, "value outside 32-bit range: " + std::to_string(v));
    pos = j;
    return static_cast<Value>(v);
  }
};

}  // namespace

TestSuite parse_test_file(std::string_view text) {
  TestSuite suite;
  std::size_t start = 0;
  int line_no = 0;
  bool header_seen = false;

  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start
                                                                            : nl - start);
    ++line_no;
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    LineScanner sc{line, 0, line_no};
    if (sc.at_end()) continue;

    if (!header_seen) {
      sc.skip_ws();
      if (line.substr(sc.pos, 2) != "#T") throw ParseError(line_no, "missing #T signature");
      sc.pos += 2;
      sc.skip_ws();
      std::size_t j = sc.pos;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      if (j == sc.pos) throw ParseError(line_no, "missing suite name");
      suite.name = std::string(line.substr(sc.pos, j - sc.pos));
      sc.pos = j;
      sc.skip_ws();
      suite.comment = std::string(line.substr(sc.pos));
      while (!suite.comment.empty() && (suite.comment.back() == '\r')) suite.comment.pop_back();
      header_seen = true;
      continue;
    }

    if (line[sc.pos] == '#') continue;

    TestItem item;
    sc.expect("<in>");
    while (!sc.peek("</in>")) item.inputs.push_back(sc.next_int());
    sc.expect("</in>");
    sc.expect("<out>");
    while (!sc.peek("</out>")) item.outputs.push_back(sc.next_int());
    sc.expect("</out>");
    if (!sc.at_end()) throw ParseError(line_no, "trailing text after </out>");
    if (item.outputs.empty()) throw ParseError(line_no, "item must have at least one output");

    if (suite.items.empty()) {
      suite.m = static_cast<int>(item.inputs.size());
      suite.n = static_cast<int>(item.outputs.size());
    } else if (static_cast<int>(item.inputs.size()) != suite.m ||
               static_cast<int>(item.outputs.size()) != suite.n) {
      throw ParseError(line_no, "mixed item signatures");
    }
    suite.items.push_back(std::move(item));
  }

  if (!header_seen) throw ParseError(1, "missing #T signature");
  if (suite.items.empty()) throw ParseError(line_no, "suite has no items");
  return suite;
}

std::string format_test_file(const TestSuite& suite) {
  std::ostringstream out;
  out << "#T " << suite.name;
  if (!suite.comment.empty()) out << ' ' << suite.comment;
  out << '\n';
  for (const TestItem& it : suite.items) {
    out << "<in>";
    for (Value v : it.inputs) out << ' ' << v;
    out << " </in><out>";
    for (Value v : it.outputs) out << ' ' << v;
    out << " </out>\n";
  }
  return out.str();
}

TestSuite load_suite(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_test_file(ss.str());
}

std::vector<TestSuite> load_suites_dir(const std::filesystem::path& dir) {
  std::vector<TestSuite> out;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".tst") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) out.push_back(load_suite(p));
  return out;
}

int evaluate_prechecked(Executor& ex, const std::uint8_t* code, std::size_t len,
                        const Dictionary& dict, const TestSuite& suite, const ExecLimits& limits,
                        bool strict, std::vector<std::uint64_t>* mask_out,
                        std::vector<Fault>* faults_out) {
  int pass = 0;
  const std::size_t n = static_cast<std::size_t>(suite.n);
  for (std::size_t i = 0; i < suite.items.size(); ++i) {
    const TestItem& item = suite.items[i];
    Fault f = ex.run(code, len, dict, item.inputs, limits);
    if (faults_out) (*faults_out)[i] = f;
    if (f != Fault::None) continue;
    auto st = ex.stack();
    bool ok;
    if (strict) {
      ok = st.size() == n && std::equal(st.begin(), st.end(), item.outputs.begin());
    } else {
      ok = st.size() >= n &&
           std::equal(st.end() - n, st.end(), item.outputs.begin(), item.outputs.end());
    }
    if (ok) {
      ++pass;
      if (mask_out) (*mask_out)[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
  }
  return pass;
}

EvalReport evaluate(const Program& program, const Dictionary& dict, const TestSuite& suite,
                    const ExecLimits& limits, bool strict, bool fast_path) {
  EvalReport r;
  r.mask.assign((suite.items.size() + 63) / 64, 0);
  r.faults.assign(suite.items.size(), Fault::None);

  StackEffect eff = static_analyze(program, dict);
  bool sig_ok = eff.valid && eff.consumed == suite.m && eff.produced == suite.n;
  if (strict && !sig_ok && fast_path) return r;  // cannot pass any item

  Executor ex;
  if (strict && !sig_ok) {
    // Slow path kept for the fast-path equivalence check: run the items but a
    // signature mismatch fails them all by definition.
    for (std::size_t i = 0; i < suite.items.size(); ++i)
      r.faults[i] = execute(program, dict, suite.items[i].inputs, limits).fault;
    return r;
  }
  r.pass_count = evaluate_prechecked(ex, program.bytes.data(), program.size(), dict, suite, limits,
                                     strict, &r.mask, &r.faults);
  return r;
}

bool passes_all(const EvalReport& r, const TestSuite& suite) {
  return r.pass_count == static_cast<int>(suite.items.size());
}

}  // namespace gene
