#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"

namespace fs = std::filesystem;
using gene::format_test_file;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "gene_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  fs::path out = work_dir() / "out.txt";
  std::string cmd = std::string(GENE_BIN_PATH) + " " + args + " >" + out.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  std::ifstream f(out);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
  fs::path p = work_dir() / name;
  std::ofstream f(p);
  f << text;
  return p;
}

fs::path square_suite() {
  static fs::path p = write("SQUARE.tst", format_test_file(oracle::unary_suite(
                                              "SQUARE", oracle::sample_domain(-500, 500, 20, 90),
                                              [](oracle::Value x) { return oracle::mul(x, x); })));
  return p;
}

}  // namespace

TEST_CASE("cli: run evaluates a program file") {
  fs::path prog = write("fact.4th",
                        ": FACTORIAL CONST 1 OVER -- -ROT * OVER IF -6 SWAP DROP ;\n");
  std::vector<std::pair<std::vector<oracle::Value>, std::vector<oracle::Value>>> rows;
  for (int n = 1; n <= 8; ++n) rows.push_back({{n}, {oracle::factorial(n)}});
  fs::path suite = write("FACT.tst", format_test_file(oracle::make_suite("FACTORIAL",
                                                                         std::move(rows))));
  CliResult r = run_cli("run " + suite.string() + " " + prog.string() + " --items");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("8/8") != std::string::npos);
  CHECK(r.out.find("item 0: PASS") != std::string::npos);

  // a failing program exits 1 and shows the mask
  CliResult bad = run_cli("run " + suite.string() + " --text \"DUP +\"");
  CHECK(bad.exit_code == 1);
}

TEST_CASE("cli: enumerate rediscovers SQUARE and writes the report") {
  fs::path out = work_dir() / "sq";
  CliResult r = run_cli("enumerate " + square_suite().string() +
                        " --max-len 2 --alphabet DUP --alphabet '*' --workers 1 --out " +
                        out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find(": SQUARE DUP * ;") != std::string::npos);
  std::string report = slurp(out / "report.txt");
  CHECK(report.find("0: ") != std::string::npos);
  CHECK(slurp(out / "found.txt") == ": SQUARE DUP * ;\n");
}

TEST_CASE("cli: generate is reproducible for a fixed seed and attempt budget") {
  fs::path a = work_dir() / "genA";
  fs::path b = work_dir() / "genB";
  std::string base = "generate " + square_suite().string() +
                     " --mode markov --attempts 20000 --seed 7 --workers 1 --lmin 1 --lmax 4 "
                     "--alphabet DUP --alphabet SWAP --alphabet '*' --alphabet '+' --out ";
  CliResult r1 = run_cli(base + a.string());
  CliResult r2 = run_cli(base + b.string());
  CHECK(r1.exit_code == r2.exit_code);
  CHECK(slurp(a / "report.txt") == slurp(b / "report.txt"));
  CHECK(slurp(a / "model.txt") == slurp(b / "model.txt"));
  // the model dump reloads
  CliResult r3 = run_cli("generate " + square_suite().string() +
                         " --mode unigram --attempts 1000 --seed 8 --workers 1 --model " +
                         (a / "model.txt").string() + " --alphabet DUP --alphabet '*'");
  CHECK(r3.exit_code <= 1);
}

TEST_CASE("cli: basestep finds SQUARE during its cycles") {
  CliResult r = run_cli("basestep " + square_suite().string() +
                        " --l0 1 --l1 2 --attempts 60000 --seed 3 --workers 1 "
                        "--alphabet DUP --alphabet '*'");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("DUP *") != std::string::npos);
}

TEST_CASE("cli: config file values are used and flags win") {
  fs::path cfg = write("gene.cfg", "max-len=2\nworkers=1\n");
  CliResult r = run_cli("enumerate " + square_suite().string() + " --config " + cfg.string() +
                        " --alphabet DUP --alphabet '*'");
  CHECK(r.exit_code == 0);
  // the flag overrides the config's max-len and makes the search too short
  CliResult r2 = run_cli("enumerate " + square_suite().string() + " --config " + cfg.string() +
                         " --alphabet DUP --alphabet '*' --max-len 1");
  CHECK(r2.exit_code == 1);
}

TEST_CASE("cli: malformed suites fail cleanly") {
  fs::path bad = write("bad.tst", "#T X\n<in> 1 </in>\n");
  CliResult r = run_cli("run " + bad.string() + " --text \"DUP\"");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("error:") != std::string::npos);

  CliResult missing = run_cli("enumerate /nonexistent.tst --max-len 1");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("cli: admissible prints the kept word list") {
  CliResult r = run_cli("admissible " + square_suite().string() +
                        " --base-words DUP --base-words SWAP --system-words '*' "
                        "--system-words NEG --l0 2 --l1 3 --attempts 4000 --sample-size 2000 "
                        "--seed 5 --workers 1");
  // the * trial solves the square suite outright
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("admissible:") != std::string::npos);
}

TEST_CASE("cli: evolve on an easy suite exits zero and writes a transcript") {
  fs::path out = work_dir() / "ev";
  CliResult r = run_cli("evolve " + square_suite().string() +
                        " --alphabet DUP --alphabet '*' --l0 2 --l1 3 --step-attempts 4000 "
                        "--sample-size 1000 --seed 2 --workers 1 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(slurp(out / "transcript.txt").find("FOUND") != std::string::npos);
  CHECK(slurp(out / "found.txt").find("DUP *") != std::string::npos);
}
