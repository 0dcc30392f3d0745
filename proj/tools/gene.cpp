// gene: program search over a minimal Forth-style stack machine.
//
// Subcommands mirror the pipeline stages: run, enumerate, generate, basestep,
// admissible, evolve. Search commands exit 0 when a full-pass program was
// found, 1 when not, 2 on errors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "gene/evolve.hpp"

namespace fs = std::filesystem;
using namespace gene;

namespace {

struct CommonOpts {
  std::string suite_path;
  std::vector<std::string> dict_paths;
  bool tolerate_invalid = false;
  std::vector<std::string> alphabet_names;
  std::vector<std::string> forbid_extra;
  bool no_prune = false;
  std::string const_spec;
  std::uint64_t seed = 1;
  double seconds = 0.0;
  std::uint64_t attempts = 0;
  int np = 400;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  std::string out_dir;
  int max_steps = 10000;
  int max_stack = 256;
  int max_call_depth = 64;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_suite = true) {
  cmd->set_config("--config", "", "key=value file mirroring the flags; flags win");
  if (needs_suite)
    cmd->add_option("suite", o.suite_path, "test suite (.tst file)")->required();
  cmd->add_option("--dict", o.dict_paths, "word definition file(s) loaded before the run");
  cmd->add_flag("--tolerate-invalid", o.tolerate_invalid,
                "keep dictionary words with an invalid static signature");
  cmd->add_option("--alphabet", o.alphabet_names,
                  "search alphabet word names (default: the 33-word base set)");
  cmd->add_option("--forbid", o.forbid_extra, "extra forbidden pair \"A B\"");
  cmd->add_flag("--no-prune", o.no_prune, "disable forbidden-pair pruning");
  cmd->add_option("--const-values", o.const_spec,
                  "CONST operand pool, e.g. \"-3..-1,1..12\" (default)");
  cmd->add_option("--seed", o.seed, "RNG seed (single-worker runs are then reproducible)");
  cmd->add_option("--seconds", o.seconds, "wall-clock budget");
  cmd->add_option("--attempts", o.attempts, "candidate budget (deterministic alternative)");
  cmd->add_option("--np", o.np, "partial-program list capacity");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--out", o.out_dir, "directory for report/model/transcript artifacts");
  cmd->add_option("--max-steps", o.max_steps, "VM step limit per test item");
  cmd->add_option("--max-stack", o.max_stack, "VM stack limit");
  cmd->add_option("--max-call-depth", o.max_call_depth, "VM call depth limit");
}

ExecLimits limits_of(const CommonOpts& o) {
  return ExecLimits{o.max_steps, o.max_stack, o.max_call_depth};
}

Budget budget_of(const CommonOpts& o) {
  Budget b;
  b.max_attempts = o.attempts;
  b.max_seconds = o.seconds;
  return b;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

Dictionary load_dictionary(const CommonOpts& o) {
  Dictionary dict = Dictionary::builtins();
  for (const std::string& p : o.dict_paths) assemble(read_file(p), dict, o.tolerate_invalid);
  return dict;
}

std::vector<std::int8_t> parse_const_spec(const std::string& spec) {
  if (spec.empty()) return default_const_values();
  std::vector<std::int8_t> out;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t dots = part.find("..");
    long lo, hi;
    if (dots == std::string::npos) {
      lo = hi = std::stol(part);
    } else {
      lo = std::stol(part.substr(0, dots));
      hi = std::stol(part.substr(dots + 2));
    }
    for (long v = lo; v <= hi; ++v)
      if (v >= -128 && v <= 127) out.push_back(static_cast<std::int8_t>(v));
  }
  return out;
}

SearchAlphabet alphabet_of(const CommonOpts& o, const Dictionary& dict) {
  SearchAlphabet a = o.alphabet_names.empty() ? default_search_alphabet(dict)
                                              : alphabet_from_names(o.alphabet_names, dict);
  a.const_values = parse_const_spec(o.const_spec);
  return a;
}

ForbiddenPairs forbidden_of(const CommonOpts& o, const Dictionary& dict) {
  if (o.no_prune) return ForbiddenPairs::none();
  ForbiddenPairs f = ForbiddenPairs::defaults(dict);
  for (const std::string& spec : o.forbid_extra) {
    std::stringstream ss(spec);
    std::string a, b;
    ss >> a >> b;
    const Word* wa = dict.find(a);
    const Word* wb = dict.find(b);
    if (!wa || !wb) throw std::runtime_error("bad --forbid pair: " + spec);
    f.add(wa->code, wb->code);
  }
  return f;
}

// Timing stays on stdout; the report artifact is reproducible for a fixed
// seed and attempt budget.
std::string counters_header(const SearchCounters& c) {
  std::ostringstream os;
  os << "# generated " << c.generated << "\n# evaluated " << c.evaluated << '\n';
  return os.str();
}

void write_search_artifacts(const CommonOpts& o, const Dictionary& dict,
                            const PartialProgramList& partials, const PassHistogram& hist,
                            const SearchCounters& counters,
                            const std::optional<Program>& found, const std::string& suite_name,
                            const FrequencyModel* model, const std::string* transcript) {
  if (o.out_dir.empty()) return;
  fs::create_directories(o.out_dir);
  fs::path dir(o.out_dir);
  std::string report = counters_header(counters) + histogram_report(hist) +
                       partials_report(partials, dict);
  write_file(dir / "report.txt", report);
  if (model) write_file(dir / "model.txt", dump_model(*model, dict));
  if (transcript) write_file(dir / "transcript.txt", *transcript);
  write_file(dir / "dict.txt", dump_dictionary(dict));
  if (found)
    write_file(dir / "found.txt",
               ": " + suite_name + " " + disassemble(*found, dict) + " ;\n");
}

int report_found(const std::optional<Program>& found, const Dictionary& dict,
                 const TestSuite& suite, const SearchCounters& counters) {
  std::cout << "generated " << counters.generated << ", evaluated " << counters.evaluated
            << ", " << counters.seconds << "s";
  if (counters.seconds > 0)
    std::cout << " (" << static_cast<std::uint64_t>(counters.generated / counters.seconds)
              << " programs/s)";
  std::cout << '\n';
  if (found) {
    std::cout << ": " << suite.name << " " << disassemble(*found, dict) << " ;\n";
    return 0;
  }
  std::cout << "no full-pass program found\n";
  return 1;
}

int cmd_run(const CommonOpts& o, const std::string& program_path, const std::string& program_text,
            bool show_items, bool trace) {
  Dictionary dict = load_dictionary(o);
  TestSuite suite = load_suite(o.suite_path);
  std::string text = program_text.empty() ? read_file(program_path) : program_text;

  Program prog;
  if (text.find(':') != std::string::npos) {
    std::vector<std::uint8_t> added = assemble(text, dict, o.tolerate_invalid);
    if (added.empty()) throw std::runtime_error("no definitions in program text");
    prog = dict.at(added.back()).body;
  } else {
    prog = assemble_body(text, dict);
  }

  ExecLimits limits = limits_of(o);
  EvalReport rep = evaluate(prog, dict, suite, limits, /*strict=*/true);
  std::string mask;
  for (std::size_t i = 0; i < suite.items.size(); ++i) mask += rep.passed(i) ? 'X' : '.';
  std::cout << suite.name << ": " << rep.pass_count << '/' << suite.items.size() << "  " << mask
            << '\n';
  if (show_items || trace) {
    for (std::size_t i = 0; i < suite.items.size(); ++i) {
      const TestItem& it = suite.items[i];
      std::cout << "item " << i << ": " << (rep.passed(i) ? "PASS" : "FAIL");
      if (rep.faults[i] != Fault::None) std::cout << " (" << fault_name(rep.faults[i]) << ")";
      if (trace) {
        ExecTrace tr;
        ExecOutcome out = execute(prog, dict, it.inputs, limits, &tr);
        std::cout << "  [";
        DecodeResult dec = decode(prog, dict);
        for (std::size_t j = 0; j < tr.offsets.size(); ++j) {
          for (const Instr& in : dec.instrs)
            if (in.offset == tr.offsets[j]) {
              std::cout << (j ? " " : "") << dict.at(in.code).name;
              break;
            }
        }
        std::cout << "] -> stack";
        for (Value v : out.stack) std::cout << ' ' << v;
      }
      std::cout << '\n';
    }
  }
  return passes_all(rep, suite) ? 0 : 1;
}

int cmd_enumerate(const CommonOpts& o, int max_len) {
  Dictionary dict = load_dictionary(o);
  TestSuite suite = load_suite(o.suite_path);
  EnumConfig cfg;
  cfg.max_len = max_len;
  cfg.budget = budget_of(o);
  cfg.np = o.np;
  cfg.workers = o.workers;
  SearchResult res = enumerate_programs(suite, dict, alphabet_of(o, dict), forbidden_of(o, dict),
                                        limits_of(o), cfg);
  FrequencyModel model = build_model(res.partials, dict);
  write_search_artifacts(o, dict, res.partials, res.histogram, res.counters, res.found, suite.name,
                         &model, nullptr);
  std::cout << "completed length " << res.completed_len << '\n';
  return report_found(res.found, dict, suite, res.counters);
}

int cmd_generate(const CommonOpts& o, const std::string& mode_name, int lmin, int lmax,
                 const std::string& model_in) {
  Dictionary dict = load_dictionary(o);
  TestSuite suite = load_suite(o.suite_path);
  GenMode mode = mode_name == "markov" ? GenMode::Markov : GenMode::Unigram;
  FrequencyModel model;
  if (!model_in.empty()) model = parse_model(read_file(model_in), dict);
  GenerateResult res =
      generate_programs(suite, dict, alphabet_of(o, dict), forbidden_of(o, dict), limits_of(o),
                        model, mode, lmin, lmax, budget_of(o), o.seed, o.np, o.workers);
  FrequencyModel out_model = build_model(res.partials, dict);
  write_search_artifacts(o, dict, res.partials, res.histogram, res.counters, res.found, suite.name,
                         &out_model, nullptr);
  return report_found(res.found, dict, suite, res.counters);
}

int cmd_basestep(const CommonOpts& o, int l0, int l1, int cycles, double cycle_seconds,
                 std::uint64_t cycle_attempts) {
  Dictionary dict = load_dictionary(o);
  TestSuite suite = load_suite(o.suite_path);
  BaseStepConfig cfg;
  cfg.l0 = l0;
  cfg.l1 = l1;
  cfg.cycles = cycles;
  cfg.gen_budget = budget_of(o);
  if (cycle_seconds > 0) cfg.gen_budget.max_seconds = cycle_seconds * cycles;
  if (cycle_attempts > 0) cfg.gen_budget.max_attempts = cycle_attempts * cycles;
  cfg.np = o.np;
  cfg.workers = o.workers;
  cfg.seed = o.seed;
  BaseStepResult res = base_step(suite, dict, alphabet_of(o, dict), forbidden_of(o, dict),
                                 limits_of(o), cfg);
  write_search_artifacts(o, dict, res.partials, res.histogram, res.counters, res.found, suite.name,
                         &res.model, nullptr);
  return report_found(res.found, dict, suite, res.counters);
}

int cmd_admissible(const CommonOpts& o, const std::vector<std::string>& base_names,
                   const std::vector<std::string>& system_names, int l0, int l1,
                   std::uint64_t sample_size) {
  Dictionary dict = load_dictionary(o);
  TestSuite suite = load_suite(o.suite_path);
  AdmissibleConfig cfg;
  cfg.step.l0 = l0;
  cfg.step.l1 = l1;
  cfg.step.gen_budget = budget_of(o);
  cfg.step.np = o.np;
  cfg.step.workers = o.workers;
  cfg.step.seed = o.seed;
  cfg.quality_sample = sample_size;

  std::vector<std::uint8_t> base = base_names.empty()
                                       ? default_base_words()
                                       : alphabet_from_names(base_names, dict).codes;
  std::vector<std::uint8_t> sys = system_names.empty()
                                      ? default_system_words()
                                      : alphabet_from_names(system_names, dict).codes;
  Transcript tr;
  AdmissibleResult res = select_admissible(suite, dict, base, sys, forbidden_of(o, dict),
                                           limits_of(o), cfg, &tr);
  std::cout << "admissible:";
  for (std::uint8_t c : res.genome.alphabet.codes) std::cout << ' ' << dict.at(c).name;
  std::cout << '\n';
  SearchCounters counters;
  write_search_artifacts(o, res.genome.dict, res.partials, PassHistogram{}, counters, res.found,
                         suite.name, &res.model, &tr.text);
  return report_found(res.found, res.genome.dict, suite, counters);
}

int cmd_evolve(const CommonOpts& o, int l0, int l1, std::uint64_t sample_size, int retries,
               double adm_seconds, std::uint64_t adm_attempts, int batch) {
  Dictionary dict = load_dictionary(o);
  TestSuite suite = load_suite(o.suite_path);
  EvolveConfig cfg;
  cfg.gene_step.l0 = l0;
  cfg.gene_step.l1 = l1;
  cfg.gene_step.np = o.np;
  cfg.gene_step.workers = o.workers;
  cfg.admissible.step = cfg.gene_step;
  cfg.admissible.step.gen_budget =
      Budget{adm_attempts, adm_seconds};
  cfg.admissible.quality_sample = sample_size;
  cfg.quality_sample = sample_size;
  cfg.candidate_batch = static_cast<std::size_t>(batch);
  cfg.total = budget_of(o);
  cfg.seed = o.seed;
  cfg.retries = retries;
  // Per-gene budget: a slice of the total when attempts-bounded, else the
  // admissible budget.
  cfg.gene_step.gen_budget = cfg.admissible.step.gen_budget;
  if (!o.alphabet_names.empty()) {
    SearchAlphabet a = alphabet_of(o, dict);
    cfg.fixed_alphabet = a;
  }

  EvolveResult res = evolve(suite, dict, limits_of(o), cfg);
  SearchCounters counters;
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_file(fs::path(o.out_dir) / "transcript.txt", res.transcript);
    write_file(fs::path(o.out_dir) / "dict.txt", dump_dictionary(res.genome.dict));
    if (res.found) {
      write_file(fs::path(o.out_dir) / "found.txt",
                 ": " + suite.name + " " + disassemble(*res.found, res.genome.dict) + " ;\n");
      Program flat = inline_genes(*res.found, res.genome.dict);
      write_file(fs::path(o.out_dir) / "found_inlined.txt",
                 ": " + suite.name + " " + disassemble(flat, res.genome.dict) + " ;\n");
    }
  }
  return report_found(res.found, res.genome.dict, suite, counters);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"program search over a minimal Forth-style stack machine"};
  app.require_subcommand(1);

  CommonOpts o;

  auto* run = app.add_subcommand("run", "assemble a program and evaluate it against a suite");
  std::string program_path, program_text;
  bool show_items = false, trace = false;
  add_common(run, o);
  run->add_option("program", program_path, "program file (definitions or a bare body)");
  run->add_option("--text", program_text, "inline program text instead of a file");
  run->add_flag("--items", show_items, "print one line per test item");
  run->add_flag("--trace", trace, "print the executed instruction sequence per item");

  auto* enumerate = app.add_subcommand("enumerate", "exhaustive search up to a length bound");
  int max_len = 5;
  add_common(enumerate, o);
  enumerate->add_option("--max-len", max_len, "instruction-count bound (END excluded)");

  auto* generate = app.add_subcommand("generate", "probabilistic or Markov search from a model");
  std::string mode_name = "unigram", model_in;
  int lmin = 1, lmax = 8;
  add_common(generate, o);
  generate->add_option("--mode", mode_name, "unigram|markov")
      ->check(CLI::IsMember({"unigram", "markov"}));
  generate->add_option("--lmin", lmin, "minimum program length");
  generate->add_option("--lmax", lmax, "maximum program length");
  generate->add_option("--model", model_in, "frequency model dump to sample from");

  auto* basestep = app.add_subcommand("basestep", "full search to L0 then 8 generation cycles");
  int l0 = 7, l1 = 14, cycles = 8;
  double cycle_seconds = 0;
  std::uint64_t cycle_attempts = 0;
  add_common(basestep, o);
  basestep->add_option("--l0", l0, "exhaustive length bound");
  basestep->add_option("--l1", l1, "generation length bound");
  basestep->add_option("--cycles", cycles, "generation cycles");
  basestep->add_option("--cycle-seconds", cycle_seconds, "seconds per cycle (overrides --seconds)");
  basestep->add_option("--cycle-attempts", cycle_attempts,
                       "attempts per cycle (overrides --attempts)");

  auto* admissible = app.add_subcommand("admissible", "greedy admissible-word selection");
  std::vector<std::string> base_names, system_names;
  std::uint64_t sample_size = 10000;
  int adm_l0 = 4, adm_l1 = 10;
  add_common(admissible, o);
  admissible->add_option("--base-words", base_names, "starting word list (default: 11 words)");
  admissible->add_option("--system-words", system_names, "words offered one at a time");
  admissible->add_option("--l0", adm_l0, "base-step exhaustive bound");
  admissible->add_option("--l1", adm_l1, "base-step generation bound");
  admissible->add_option("--sample-size", sample_size, "genome quality sample size");

  auto* evolve_cmd = app.add_subcommand("evolve", "the full gene-evolution loop");
  int ev_l0 = 4, ev_l1 = 10, retries = 0, batch = 8;
  std::uint64_t ev_sample = 10000, adm_attempts = 0;
  double adm_seconds = 0;
  add_common(evolve_cmd, o);
  evolve_cmd->add_option("--l0", ev_l0, "base-step exhaustive bound");
  evolve_cmd->add_option("--l1", ev_l1, "base-step generation bound");
  evolve_cmd->add_option("--sample-size", ev_sample, "genome quality sample size");
  evolve_cmd->add_option("--retries", retries, "fresh-seed retries on budget exhaustion");
  evolve_cmd->add_option("--step-seconds", adm_seconds, "per-base-step seconds");
  evolve_cmd->add_option("--step-attempts", adm_attempts, "per-base-step attempts");
  evolve_cmd->add_option("--batch", batch, "gene candidates per refill");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(o, program_path, program_text, show_items, trace);
    if (enumerate->parsed()) return cmd_enumerate(o, max_len);
    if (generate->parsed()) return cmd_generate(o, mode_name, lmin, lmax, model_in);
    if (basestep->parsed()) return cmd_basestep(o, l0, l1, cycles, cycle_seconds, cycle_attempts);
    if (admissible->parsed())
      return cmd_admissible(o, base_names, system_names, adm_l0, adm_l1, sample_size);
    if (evolve_cmd->parsed())
      return cmd_evolve(o, ev_l0, ev_l1, ev_sample, retries, adm_seconds, adm_attempts, batch);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
