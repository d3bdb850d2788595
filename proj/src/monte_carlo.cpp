#include <cmath>
#include <numbers>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/weights.hpp"

namespace bergman {

namespace {

// Value v and radial derivative r dv/dr of a node at the point t = r w.
struct Eval {
  double value;
  double log_deriv_num;  // r dv/dr
};

Eval eval_ray(const EggNode& node, std::span<const double> t, std::size_t& next) {
  if (node.leaf) {
    const double v = t[next++];
    return {v, v};  // leaf terms are linear in r
  }
  double sum = 0.0, dsum = 0.0;
  for (const auto& c : node.children) {
    const Eval e = eval_ray(c, t, next);
    sum += e.value;
    dsum += e.log_deriv_num;
  }
  if (node.exponent == 1.0) return {sum, dsum};
  const double v = std::pow(sum, node.exponent);
  return {v, node.exponent * v / sum * dsum};
}

class RayFunction {
 public:
  RayFunction(const EggDomain& d, std::span<const double> w) : domain_(d), w_(w), t_(w.size()) {}

  Eval at(double log_r) {
    const double r = std::exp(log_r);
    for (std::size_t j = 0; j < w_.size(); ++j) t_[j] = r * w_[j];
    std::size_t next = 0;
    return eval_ray(domain_.root(), t_, next);
  }

  /// log R with F(R w) = 1, by safeguarded Newton on log F(e^L w).
  double boundary_log_radius() {
    double lo = -1.0, hi = 1.0;
    while (std::log(at(lo).value) > 0.0) lo *= 2.0;
    while (std::log(at(hi).value) < 0.0) hi *= 2.0;
    double x = 0.0;
    for (int it = 0; it < 200; ++it) {
      const Eval e = at(x);
      const double g = std::log(e.value);
      if (std::abs(g) < 1e-14) break;
      if (g < 0.0) lo = x; else hi = x;
      double next = x - g * e.value / e.log_deriv_num;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (hi - lo < 1e-15) break;
      x = next;
    }
    return x;
  }

 private:
  const EggDomain& domain_;
  std::span<const double> w_;
  std::vector<double> t_;
};

}  // namespace

OracleEstimate oracle_norm(const EggDomain& domain, double s, const MultiIndex& alpha, std::size_t budget,
                           std::uint64_t seed, const OracleOptions& options) {
  if (budget < 10'000) throw InputError("oracle_norm: budget must be at least 10^4 samples");
  if (!(s > -1.0)) throw DomainError("oracle_norm: weight exponent must satisfy s > -1");
  const std::size_t m = domain.dimension();
  if (alpha.size() != m) throw InputError("oracle_norm: multi-index length differs from domain dimension");
  if (m == 0) return {1.0, 0.0, budget};
  if (options.strata < 1 || 2 * static_cast<std::size_t>(options.strata) > budget ||
      !(options.flatten > 0.0 && options.flatten <= 1.0))
    throw InputError("oracle_norm: bad options");

  // Integrand in t_j = |z_j|^{2p_j}: (2pi)^m prod(1/(2p_j)) t_j^{a_j - 1} (1 - F(t))^s.
  const auto powers = domain.leaf_powers();
  std::vector<double> a(m), beta(m);
  double log_const = static_cast<double>(m) * std::log(2.0 * std::numbers::pi);
  double total_a = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    a[j] = (alpha[j] + 1) / (powers[j] / 2.0);
    beta[j] = options.flatten * a[j] + (1.0 - options.flatten);
    total_a += a[j];
    log_const -= std::log(powers[j]);
  }
  // Normaliser of the Dirichlet(beta) proposal density.
  const double log_beta_norm = m > 1 ? log_multibeta(beta) : 0.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::gamma_distribution<double>> gammas;
  for (double b : beta) gammas.emplace_back(b, 1.0);

  std::vector<double> w(m), t(m);
  const auto H = static_cast<std::size_t>(options.strata);
  std::vector<double> mean(H, 0.0), m2(H, 0.0);
  std::vector<std::size_t> count(H, 0);
  for (std::size_t i = 0; i < budget; ++i) {
    // Direction on the simplex.
    double log_w = 0.0;
    if (m == 1) {
      w[0] = 1.0;
    } else {
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        do { w[j] = gammas[j](rng); } while (!(w[j] > 0.0));
        sum += w[j];
      }
      for (std::size_t j = 0; j < m; ++j) {
        w[j] /= sum;
        log_w += (a[j] - beta[j]) * std::log(w[j]);
      }
      log_w += log_beta_norm;
    }

    RayFunction ray(domain, w);
    const double log_R = ray.boundary_log_radius();

    // r = R u^{1/A}, u stratified over shells:
    // int_0^R r^{A-1} g(r) dr = R^A / A * E_u[g].
    const std::size_t h = i % H;
    const double u = (static_cast<double>(h) + unif(rng)) / static_cast<double>(H);
    double log_g = 0.0;
    if (s != 0.0) {
      const double log_r = log_R + std::log(u) / total_a;
      const double F = ray.at(log_r).value;
      log_g = s * std::log1p(-std::min(F, 1.0));
    }
    const double x = std::exp(log_const + log_w + total_a * log_R - std::log(total_a) + log_g);

    const double delta = x - mean[h];
    mean[h] += delta / static_cast<double>(++count[h]);
    m2[h] += delta * (x - mean[h]);
  }
  // Equal-probability strata: average of stratum means, variance sum s_h^2 / n_h / H^2.
  double estimate = 0.0, variance = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    const double nh = static_cast<double>(count[h]);
    estimate += mean[h];
    variance += m2[h] / (nh - 1.0) / nh;
  }
  const double Hd = static_cast<double>(H);
  return {estimate / Hd, std::sqrt(variance) / Hd, budget};
}

}  // namespace bergman
