#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "bergman/cli.hpp"
#include "bergman/errors.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bergman::InputError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool parse_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw bergman::InputError("--pruned expects true or false");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monomial norms, box covers, weighted shifts and resolution checks on egg domains"};
  app.require_subcommand(1, 1);

  std::string spec_path, out_dir = ".", pgrid, pruned;
  int cap = -1;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool have_seed = false;

  const char* commands[][2] = {
      {"weights", "table of omega over a degree range"},
      {"decompose", "box cover of the ideal complement, raw and pruned"},
      {"commutators", "commutator entries and shell decay"},
      {"schatten", "Schatten partial sums and critical exponent"},
      {"resolution", "chain-complex, exactness and module-map verdicts"},
      {"isometry", "slice isometry residuals"},
      {"oracle", "Monte-Carlo validation of omega"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--spec", spec_path, "job JSON file")->required();
    sub->add_option("--out", out_dir, "report directory");
    sub->add_option("--cap", cap, "degree cap");
    sub->add_option("--pgrid", pgrid, "p grid a:b:step");
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { seed = v; have_seed = true; },
                                            "oracle seed");
    sub->add_option("--pruned", pruned, "resolve with the pruned cover (true|false)");
    sub->add_option("--threads", threads, "worker threads");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bergman::kExitInputError;
  }

  try {
    bergman::JobSpec job = bergman::parse_job(read_file(spec_path));
    if (cap >= 0) job.cap = cap;
    if (!pgrid.empty()) job.p_grid = bergman::parse_pgrid(pgrid);
    if (have_seed) job.seed = seed;
    if (!pruned.empty()) job.pruned = parse_bool(pruned);
    if (threads > 0) job.threads = threads;
    return bergman::run_command(app.get_subcommands().front()->get_name(), job, out_dir);
  } catch (const bergman::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bergman::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bergman::kExitInputError;
  }
}
