#include "bergman/cli.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/operators.hpp"
#include "bergman/parallel.hpp"
#include "bergman/resolution.hpp"

namespace bergman {

using nlohmann::json;

namespace {

EggNode parse_node(const json& j, bool root) {
  if (!j.is_object()) throw InputError("domain node must be an object");
  if (j.contains("coordinate") || j.contains("power")) {
    if (root) throw InputError("domain root must be an internal node");
    if (!j.contains("coordinate") || !j["coordinate"].is_string()) throw InputError("leaf needs a string coordinate");
    if (!j.contains("power") || !j["power"].is_number()) throw InputError("leaf needs a numeric power");
    return EggNode::make_leaf(j["coordinate"].get<std::string>(), j["power"].get<double>());
  }
  if (!j.contains("children") || !j["children"].is_array() || j["children"].empty())
    throw InputError("internal node needs a nonempty children array");
  double e = 1.0;
  if (j.contains("exponent")) {
    if (!j["exponent"].is_number()) throw InputError("node exponent must be a number");
    e = j["exponent"].get<double>();
  }
  if (root && e != 1.0) throw InputError("domain root exponent must be 1");
  std::vector<EggNode> kids;
  for (const auto& c : j["children"]) kids.push_back(parse_node(c, false));
  return EggNode::make_group(e, std::move(kids));
}

MultiIndex parse_index(const json& j) {
  if (!j.is_array()) throw InputError("multi-index must be an array of integers");
  std::vector<int> v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw InputError("multi-index entries must be integers");
    v.push_back(x.get<int>());
  }
  return MultiIndex(std::move(v));
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

json box_json(const Box& b) {
  json coords = json::array(), bounds = json::array();
  for (std::size_t i = 0; i < b.shuffle().size(); ++i) {
    coords.push_back(b.shuffle()[i] + 1);
    bounds.push_back(b.bounds()[i]);
  }
  return {{"coordinates", coords}, {"bounds", bounds}, {"text", b.to_string()}};
}

json index_json(const MultiIndex& n) {
  json a = json::array();
  for (int x : n.exponents()) a.push_back(x);
  return a;
}

std::string index_cells(const MultiIndex& n) {
  std::string s;
  for (std::size_t i = 0; i < n.size(); ++i) s += (i ? "," : "") + std::to_string(n[i]);
  return s;
}

std::string index_header(const char* prefix, std::size_t m) {
  std::string s;
  for (std::size_t i = 0; i < m; ++i) s += (i ? "," : "") + fmt::format("{}{}", prefix, i + 1);
  return s;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

class Output {
 public:
  explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw InputError("cannot create output directory " + dir_.string());
  }
  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir_ / name);
    if (!f) throw InputError("cannot write " + (dir_ / name).string());
    return f;
  }
  void write_json(const std::string& name, const json& j) const { open(name) << j.dump(2) << '\n'; }

 private:
  std::filesystem::path dir_;
};

EggDomain require_domain(const JobSpec& job) {
  if (job.domain) return *job.domain;
  if (job.ideal) return EggDomain::ball(job.ideal->dimension());
  throw InputError("job needs a domain");
}

const MonomialIdeal& require_ideal(const JobSpec& job) {
  if (!job.ideal) throw InputError("job needs an ideal");
  return *job.ideal;
}

LatticeRegion job_region(const JobSpec& job, std::size_t m) {
  return job.ideal ? LatticeRegion(*job.ideal) : LatticeRegion::full(m);
}

// ---------------------------------------------------------------------------

int cmd_weights(const JobSpec& job, const Output& out) {
  const EggDomain domain = require_domain(job);
  const WeightFunction w(domain, job.s);
  const std::size_t m = domain.dimension();
  auto csv = out.open("weights.csv");
  csv << index_header("n", m) << ",omega,log_omega\n";
  std::size_t rows = 0;
  for (const auto& n : enumerate_lattice(m, job.cap)) {
    const double lw = w.log_omega(n);
    csv << index_cells(n) << ',' << format_double(std::exp(lw)) << ',' << format_double(lw) << '\n';
    ++rows;
  }
  out.write_json("summary.json", {{"command", "weights"}, {"dimension", m}, {"s", job.s}, {"cap", job.cap},
                                  {"rows", rows}});
  return kExitOk;
}

int cmd_decompose(const JobSpec& job, const Output& out) {
  const MonomialIdeal& ideal = require_ideal(job);
  const BoxCover raw = complement_cover(ideal);
  const BoxCover pruned = prune_cover(raw);
  std::size_t raw_mismatch = 0, pruned_mismatch = 0;
  for (const auto& n : enumerate_lattice(ideal.dimension(), job.cap)) {
    const bool inside = !ideal.contains(n);
    raw_mismatch += raw.contains(n) != inside;
    pruned_mismatch += pruned.contains(n) != inside;
  }
  json jraw = json::array(), jpruned = json::array(), gens = json::array();
  for (const auto& b : raw.boxes()) jraw.push_back(box_json(b));
  for (const auto& b : pruned.boxes()) jpruned.push_back(box_json(b));
  for (const auto& g : ideal.generators()) gens.push_back(index_json(g));
  out.write_json("cover.json", {{"dimension", ideal.dimension()}, {"generators", gens}, {"raw", jraw},
                                {"pruned", jpruned}});
  const bool ok = raw_mismatch == 0 && pruned_mismatch == 0;
  out.write_json("summary.json", {{"command", "decompose"},
                                  {"raw_size", raw.size()},
                                  {"pruned_size", pruned.size()},
                                  {"cap", job.cap},
                                  {"raw_mismatches", raw_mismatch},
                                  {"pruned_mismatches", pruned_mismatch},
                                  {"verified", ok}});
  return ok ? kExitOk : kExitVerificationFailed;
}

json decay_json(const DecayFit& d) {
  return {{"exponent", number(d.exponent)},
          {"monotone_tail", d.monotone_tail},
          {"finite_rank", d.finite_rank},
          {"decay_observed", d.decay_observed}};
}

int cmd_commutators(const JobSpec& job, const Output& out) {
  const EggDomain domain = require_domain(job);
  const std::size_t m = domain.dimension();
  const WeightFunction w(domain, job.s);
  ScanOptions opts;
  opts.keep_entries = true;
  opts.diagonal_only = job.diagonal_only;
  opts.threads = job.threads;
  const auto report = essential_normality_scan(job_region(job, m), w, job.cap, opts);

  auto entries = out.open("entries.csv");
  entries << "i,k," << index_header("source", m) << ',' << index_header("target", m) << ",value\n";
  for (const auto& p : report.pairs)
    for (const auto& e : p.entries)
      entries << p.i + 1 << ',' << p.k + 1 << ',' << index_cells(e.source) << ',' << index_cells(e.target) << ','
              << format_double(e.value) << '\n';

  auto shells = out.open("shells.csv");
  shells << "degree";
  for (const auto& p : report.pairs) shells << ",sup_" << p.i + 1 << '_' << p.k + 1;
  shells << ",sup\n";
  for (std::size_t d = 0; d < report.shell_sup.size(); ++d) {
    shells << d;
    for (const auto& p : report.pairs) shells << ',' << format_double(p.shell_sup[d]);
    shells << ',' << format_double(report.shell_sup[d]) << '\n';
  }
  out.write_json("summary.json", {{"command", "commutators"}, {"dimension", m}, {"cap", job.cap},
                                  {"pairs", report.pairs.size()}, {"decay", decay_json(report.decay)}});
  return kExitOk;
}

json critical_json(const CriticalExponent& c) {
  json j = {{"estimate", number(c.estimate)},
            {"uncertainty", number(c.uncertainty)},
            {"bracket_low", c.bracket_low ? number(*c.bracket_low) : json(nullptr)},
            {"bracket_high", c.bracket_high ? number(*c.bracket_high) : json(nullptr)},
            {"regression_estimate", number(c.regression_estimate)}};
  json ratios = json::array();
  for (double r : c.increment_ratio) ratios.push_back(number(r));
  j["increment_ratio"] = ratios;
  return j;
}

int cmd_schatten(const JobSpec& job, const Output& out) {
  const EggDomain domain = require_domain(job);
  const std::size_t m = domain.dimension();
  const WeightFunction w(domain, job.s);
  ScanOptions opts;
  opts.diagonal_only = job.diagonal_only;
  opts.threads = job.threads;
  const auto grid = job.p_grid.empty() ? parse_pgrid("1:4:0.1") : job.p_grid;
  const auto report = schatten_scan(job_region(job, m), w, grid, job.cap, opts);

  auto csv = out.open("partial_sums.csv");
  csv << "i,k,p,degree,partial_sum\n";
  for (std::size_t q = 0; q < report.pairs.size(); ++q)
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto sums = report.partial_sums(q, g);
      for (std::size_t d = 0; d < sums.size(); ++d)
        csv << report.pairs[q].i + 1 << ',' << report.pairs[q].k + 1 << ',' << format_double(grid[g]) << ',' << d
            << ',' << format_double(sums[d]) << '\n';
    }
  json pairs = json::array();
  for (std::size_t q = 0; q < report.pairs.size(); ++q)
    pairs.push_back({{"i", report.pairs[q].i + 1}, {"k", report.pairs[q].k + 1},
                     {"critical", critical_json(report.pair_critical[q])}});
  json grid_json = json::array();
  for (double p : grid) grid_json.push_back(p);
  out.write_json("summary.json", {{"command", "schatten"},
                                  {"dimension", m},
                                  {"cap", job.cap},
                                  {"p_grid", grid_json},
                                  {"estimate", number(report.critical.estimate)},
                                  {"critical", critical_json(report.critical)},
                                  {"pairs", pairs}});
  return kExitOk;
}

int cmd_resolution(const JobSpec& job, const Output& out) {
  const MonomialIdeal& ideal = require_ideal(job);
  const EggDomain domain = require_domain(job);
  if (domain.dimension() != ideal.dimension()) throw InputError("ideal and domain differ in dimension");
  const BoxCover raw = complement_cover(ideal);
  const Resolution res = build_resolution(job.pruned ? prune_cover(raw) : raw);
  VerifyOptions opts;
  opts.max_labels = job.max_labels;
  opts.threads = job.threads;

  const auto chain = check_chain_complex(res, job.cap, opts);
  const auto exact = verify_exactness_pointwise(res, ideal, job.cap, opts);
  const WeightFunction w(domain, job.s);
  const auto amp = normalized_shift(w);
  json maps = json::array();
  bool maps_ok = true;
  for (std::size_t q = 0; q < res.length(); ++q) {
    const auto r = check_module_map(res, q, job.cap, amp, amp, opts);
    maps_ok = maps_ok && r.holds;
    maps.push_back({{"level", q},
                    {"holds", r.holds},
                    {"max_defect", r.max_defect},
                    {"vectors_checked", r.vectors_checked},
                    {"unverified_points", r.unverified_points}});
  }

  auto csv = out.open("failures.csv");
  csv << "check," << index_header("n", ideal.dimension()) << ",labels,verdict\n";
  auto labels_cell = [](const LabelSet& L) {
    std::string s;
    for (std::size_t i = 0; i < L.size(); ++i) s += (i ? " " : "") + std::to_string(L[i] + 1);
    return s;
  };
  for (const auto& n : chain.failed_points)
    csv << "chain_complex," << index_cells(n) << ",," << "failed\n";
  for (const auto& n : chain.unverified_points)
    csv << "chain_complex," << index_cells(n) << ",," << "unverified\n";
  for (const auto& p : exact.details)
    csv << "exactness," << index_cells(p.point) << ',' << labels_cell(p.labels) << ','
        << (p.verified ? "failed" : "unverified") << '\n';

  const bool ok = chain.holds && exact.exact && maps_ok;
  out.write_json("summary.json",
                 {{"command", "resolution"},
                  {"cover", job.pruned ? "pruned" : "raw"},
                  {"cover_size", res.length()},
                  {"cap", job.cap},
                  {"chain_complex",
                   {{"holds", chain.holds}, {"points", chain.points}, {"failures", chain.failures},
                    {"unverified", chain.unverified}}},
                  {"exactness",
                   {{"exact", exact.exact}, {"points", exact.points}, {"failures", exact.failures},
                    {"unverified", exact.unverified}}},
                  {"module_map", maps},
                  {"verified", ok}});
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_isometry(const JobSpec& job, const Output& out) {
  const EggDomain domain = require_domain(job);
  if (domain.depth() > 1) throw InputError("isometry needs a depth-1 domain");
  const std::size_t m = domain.dimension();
  if (m >= 31) throw InputError("isometry: dimension too large");
  constexpr double kTolerance = 1e-10;
  auto csv = out.open("isometry.csv");
  csv << "shuffle," << index_header("n", m) << ",constant,slice_weight,residual\n";
  double worst = 0.0;
  std::size_t rows = 0;
  const auto points = enumerate_lattice(m, job.cap);
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> coords;
    for (std::size_t c = 0; c < m; ++c)
      if (mask >> c & 1) coords.push_back(static_cast<int>(c));
    const Shuffle sh(coords);
    std::string name;
    for (std::size_t i = 0; i < coords.size(); ++i) name += (i ? " " : "") + std::to_string(coords[i] + 1);
    for (const auto& n : points) {
      std::vector<int> on;
      for (int c : coords) on.push_back(n[static_cast<std::size_t>(c)]);
      const auto f = isometry_factor(domain, sh, MultiIndex(on));
      const double r = isometry_residual(domain, sh, n);
      worst = std::max(worst, r);
      csv << name << ',' << index_cells(n) << ',' << format_double(f.constant) << ','
          << format_double(f.slice_weight) << ',' << format_double(r) << '\n';
      ++rows;
    }
  }
  const bool ok = worst <= kTolerance;
  out.write_json("summary.json", {{"command", "isometry"}, {"dimension", m}, {"cap", job.cap}, {"rows", rows},
                                  {"max_residual", worst}, {"tolerance", kTolerance}, {"verified", ok}});
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_oracle(const JobSpec& job, const Output& out) {
  const EggDomain domain = require_domain(job);
  const std::size_t m = domain.dimension();
  auto alphas = job.alphas.empty() ? enumerate_lattice(m, 2) : job.alphas;
  for (const auto& a : alphas)
    if (a.size() != m) throw InputError("oracle: multi-index length differs from domain dimension");
  const WeightFunction w(domain, job.s);
  std::vector<OracleEstimate> est(alphas.size());
  // Each multi-index gets its own stream, so results do not depend on threads.
  detail::parallel_for(alphas.size(), job.threads, [&](std::size_t i) {
    est[i] = oracle_norm(domain, job.s, alphas[i], job.samples, job.seed + i);
  });
  auto csv = out.open("oracle.csv");
  csv << index_header("alpha", m) << ",omega,estimate,standard_error,z_score,within_3se\n";
  std::size_t within = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double om = w.omega(alphas[i]);
    const double diff = std::abs(om - est[i].estimate);
    const bool ok = diff <= 3.0 * est[i].standard_error + 1e-12 * om;
    within += ok;
    const double z = est[i].standard_error > 0 ? diff / est[i].standard_error : 0.0;
    csv << index_cells(alphas[i]) << ',' << format_double(om) << ',' << format_double(est[i].estimate) << ','
        << format_double(est[i].standard_error) << ',' << format_double(z) << ',' << (ok ? 1 : 0) << '\n';
  }
  // Binomial allowance: 3-sigma agreement in at least 94% of the cases.
  const auto needed = static_cast<std::size_t>(std::ceil(0.94 * static_cast<double>(alphas.size())));
  const bool ok = within >= needed;
  out.write_json("summary.json", {{"command", "oracle"}, {"dimension", m}, {"s", job.s}, {"samples", job.samples},
                                  {"seed", job.seed}, {"cases", alphas.size()}, {"within_3se", within},
                                  {"required", needed}, {"verified", ok}});
  return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace

std::size_t JobSpec::dimension() const {
  if (domain) return domain->dimension();
  if (ideal) return ideal->dimension();
  return 0;
}

EggDomain parse_domain_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed domain JSON: ") + e.what());
  }
  return EggDomain(parse_node(j, true));
}

std::vector<double> parse_pgrid(const std::string& text) {
  double a, b, step;
  char c1, c2;
  std::istringstream in(text);
  const bool parsed = static_cast<bool>(in >> a >> c1 >> b >> c2 >> step);
  if (!parsed || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw InputError("p grid must look like a:b:step");
  if (!(step > 0.0) || !(b >= a) || !(a > 0.0)) throw InputError("p grid needs 0 < a <= b and step > 0");
  std::vector<double> grid;
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
  if (count > 100000) throw InputError("p grid too fine");
  for (long i = 0; i <= count; ++i) grid.push_back(a + static_cast<double>(i) * step);
  return grid;
}

JobSpec parse_job(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed job JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("job spec must be a JSON object");
  static const char* known[] = {"domain", "ideal", "s", "cap", "pgrid", "seed", "samples",
                                "alphas", "pruned", "diagonal_only", "max_labels", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      throw InputError("unknown job field '" + key + "'");
  }
  JobSpec job;
  if (j.contains("domain")) job.domain = EggDomain(parse_node(j["domain"], true));
  if (j.contains("ideal")) {
    if (!j["ideal"].is_array()) throw InputError("ideal must be a list of exponent vectors");
    std::vector<MultiIndex> gens;
    for (const auto& g : j["ideal"]) gens.push_back(parse_index(g));
    std::size_t m = job.domain ? job.domain->dimension() : (gens.empty() ? 0 : gens[0].size());
    if (gens.empty() && !job.domain) throw InputError("empty ideal needs a domain to fix the dimension");
    for (const auto& g : gens)
      if (g.size() != m) throw InputError("ideal generator length differs from the domain dimension");
    job.ideal = MonomialIdeal(m, std::move(gens));
  }
  job.s = get_or(j, "s", 0.0);
  job.cap = get_or(j, "cap", 10);
  if (j.contains("pgrid")) {
    if (j["pgrid"].is_string()) {
      job.p_grid = parse_pgrid(j["pgrid"].get<std::string>());
    } else {
      job.p_grid = get_or(j, "pgrid", std::vector<double>{});
    }
  }
  job.seed = get_or(j, "seed", std::uint64_t{1});
  job.samples = get_or(j, "samples", std::size_t{1'000'000});
  if (j.contains("alphas")) {
    if (!j["alphas"].is_array()) throw InputError("alphas must be a list of multi-indices");
    for (const auto& a : j["alphas"]) job.alphas.push_back(parse_index(a));
  }
  job.pruned = get_or(j, "pruned", true);
  job.diagonal_only = get_or(j, "diagonal_only", false);
  job.max_labels = get_or(j, "max_labels", std::size_t{20});
  job.threads = get_or(j, "threads", 1u);
  if (job.cap < 0) throw InputError("cap must be nonnegative");
  return job;
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

int run_command(const std::string& command, const JobSpec& job, const std::filesystem::path& out_dir) {
  using Handler = int (*)(const JobSpec&, const Output&);
  static const std::pair<const char*, Handler> table[] = {
      {"weights", cmd_weights},       {"decompose", cmd_decompose}, {"commutators", cmd_commutators},
      {"schatten", cmd_schatten},     {"resolution", cmd_resolution}, {"isometry", cmd_isometry},
      {"oracle", cmd_oracle}};
  for (const auto& [name, fn] : table)
    if (command == name) {
      if (job.domain && job.ideal && job.domain->dimension() != job.ideal->dimension())
        throw InputError("ideal and domain differ in dimension");
      return fn(job, Output(out_dir));
    }
  throw InputError("unknown command '" + command + "'");
}

}  // namespace bergman
