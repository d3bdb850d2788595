#pragma once

// Batch front end: JSON job specs in, CSV/JSON reports out.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bergman/lattice.hpp"
#include "bergman/weights.hpp"

namespace bergman {

/// Job file fields (all optional unless a command needs them):
///   domain        recursive {"exponent", "children"} / {"coordinate", "power"}
///   ideal         list of exponent vectors
///   s             weight exponent (default 0)
///   cap           degree cap (default 10)
///   pgrid         "a:b:step" or a list of exponents (default "1:4:0.1")
///   seed          oracle seed (default 1)
///   samples       oracle samples per multi-index (default 10^6)
///   alphas        oracle multi-indices (default all |alpha| <= 2)
///   pruned        resolve with the pruned cover (default true)
///   diagonal_only only [T_i, T_i^*] in commutators / schatten (default false)
///   max_labels    tractability limit of the per-point checks (default 20)
struct JobSpec {
  std::optional<EggDomain> domain;
  std::optional<MonomialIdeal> ideal;
  double s = 0.0;
  int cap = 10;
  std::vector<double> p_grid;
  std::uint64_t seed = 1;
  std::size_t samples = 1'000'000;
  std::vector<MultiIndex> alphas;
  bool pruned = true;
  bool diagonal_only = false;
  std::size_t max_labels = 20;
  unsigned threads = 1;

  std::size_t dimension() const;
};

/// InputError on malformed JSON or inconsistent fields.
EggDomain parse_domain_json(const std::string& text);
JobSpec parse_job(const std::string& text);
/// "a:b:step", inclusive of b up to rounding.
std::vector<double> parse_pgrid(const std::string& text);

/// 17 significant digits.
std::string format_double(double x);

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitVerificationFailed = 2 };

/// Runs one of: weights, decompose, commutators, schatten, resolution,
/// isometry, oracle. Writes reports into out_dir (created if missing),
/// always including summary.json. InputError on bad input.
int run_command(const std::string& command, const JobSpec& job, const std::filesystem::path& out_dir);

}  // namespace bergman
