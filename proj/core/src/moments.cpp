#include "abep/moments.hpp"

#include <cmath>
#include <random>
#include <string>

#include "abep/absorption.hpp"
#include "abep/errors.hpp"
#include "abep/rng.hpp"

namespace abep {
namespace {

void check_site(int m, int n) {
  if (m < 1 || m > n)
    throw IndexError("site " + std::to_string(m) + " outside 1.." +
                     std::to_string(n));
}

}  // namespace

double one_point_moment(int m, const SystemParams& p) {
  p.validate();
  check_site(m, p.n_sites);
  const double n = p.n_sites;
  const double sa = p.sigma * p.alpha;
  return 1.0 - sa * p.t_left * (n - m + 1.0) +
         sa * (p.t_right - p.t_left) * (m + n) * (m - n - 1.0) / (2.0 * (n + 1.0));
}

double one_point_telescoping(int m, const SystemParams& p) {
  p.validate();
  check_site(m, p.n_sites);
  const double sa = p.sigma * p.alpha;
  double sum = 0.0;
  for (int i = m; i <= p.n_sites; ++i)
    sum += sa * (p.t_left + (p.t_right - p.t_left) * i / (p.n_sites + 1.0));
  return 1.0 - sum;
}

double one_point_absorption_route(int m, const SystemParams& p) {
  p.validate();
  check_site(m, p.n_sites);
  const double sa = p.sigma * p.alpha;
  double sum = 0.0;
  for (int i = m; i <= p.n_sites; ++i) {
    const SingleAbsorption a = single_absorption_solve(i, p);
    sum += sa * (p.t_left * a.p_left + p.t_right * a.p_right);
  }
  return 1.0 - sum;
}

TwoPointMoment two_point_moment(int m, int n, const SystemParams& p) {
  p.validate();
  check_site(m, p.n_sites);
  check_site(n, p.n_sites);
  if (m > n) std::swap(m, n);
  const auto table = two_particle_table(p);
  const double tl = p.t_left;
  const double tr = p.t_right;
  const double s2 = p.sigma * p.sigma;
  const double off_weight = s2 * p.alpha * p.alpha;
  const double diag_weight = s2 * p.alpha * (p.alpha + 1.0);

  double pairs = 0.0;
  for (int i = m; i <= p.n_sites; ++i)
    for (int j = n; j <= p.n_sites; ++j) {
      const AbsorptionResult& r =
          table[static_cast<std::size_t>(std::min(i, j) - 1)]
               [static_cast<std::size_t>(std::max(i, j) - 1)];
      const double q = tl * tl * r.p_both_left + tr * tr * r.p_both_right +
                       tl * tr * r.p_split;
      pairs += (i == j ? diag_weight : off_weight) * q;
    }

  TwoPointMoment out;
  out.assembly = one_point_absorption_route(m, p) +
                 one_point_absorption_route(n, p) - 1.0 + pairs;
  out.closed_form_display = two_point_closed_form_display(m, n, p);
  return out;
}

double two_point_closed_form_display(int m_site, int n_site,
                                     const SystemParams& p) {
  p.validate();
  check_site(m_site, p.n_sites);
  check_site(n_site, p.n_sites);
  if (m_site > n_site) std::swap(m_site, n_site);
  const double m = m_site;
  const double n = n_site;
  const double big = p.n_sites;
  const double a = p.alpha;
  const double s = p.sigma;
  const double tl = p.t_left;
  const double tr = p.t_right;
  const double den = 2.0 * (big + 1.0) * (1.0 + a * (big + 1.0));

  double v = 1.0 - s * a * tl * (2.0 * big - m - n + 2.0) +
             a * s / (2.0 * (big + 1.0)) * (tr - tl) *
                 (m * m + n * n - 2.0 * big * big - 2.0 * big - m - n);

  v += (s * a) * (s * a) * (1.0 - m + big) * (1.0 - n + big) / den *
       (tl * tl * (big - m + 2.0) * (1.0 + 0.5 * a * (big - n + 2.0)) +
        tr * tr * (big + n) * (1.0 + 0.5 * a * (big + m)) +
        tl * tr * (m * (1.0 - a * (n - 1.0)) - n + a * (n + big * (big + 2.0))));

  const double cubic = a / 3.0 * (2.0 * n * n + 2.0 * big * big + 2.0 * n * big - n + big);
  v += (2.0 * s) * (2.0 * s) * a * (1.0 - n + big) / den *
       (tl * tl * (cubic - (n + big) * (2.0 * a * (big + 1.0) + 1.0) + 2.0 * big +
                   1.0 + 2.0 * a * (big + 1.0) * (big + 1.0)) +
        tr * tr * (cubic + (n + big) - 1.0) +
        2.0 * tl * tr * (-cubic + (n + big) * (a * (big + 1.0) - 1.0) + 1.0));
  return v;
}

double log_reversible_density(std::span<const double> x, const SystemParams& p) {
  p.validate_asymmetric();
  if (p.t_left != p.t_right || !(p.t_left > 0.0))
    throw ParameterError("reversible density needs T_l == T_r > 0");
  validate_energies(x, p.n_sites);
  const double s = p.sigma;
  const double a = p.alpha;
  const double t = p.t_left;
  double total = 0.0;
  for (double v : x) total += v;

  double log_d = std::expm1(-s * total) / (s * t);
  const double log_norm = std::lgamma(a) + (a - 1.0) * std::log(s) + a * std::log(t);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double site = static_cast<double>(k + 1);
    if (a != 1.0) log_d += (a - 1.0) * std::log(-std::expm1(-s * x[k]));
    log_d += -s * x[k] * (a * (site - 1.0) + 1.0) - log_norm;
  }
  return log_d;
}

double reversible_density_unnormalized(std::span<const double> x,
                                       const SystemParams& p) {
  return std::exp(log_reversible_density(x, p));
}

ReversibleSamples reversible_sampler(const SystemParams& p,
                                     std::size_t n_samples, std::uint64_t seed) {
  p.validate_asymmetric();
  if (p.t_left != p.t_right || !(p.t_left > 0.0))
    throw ParameterError("reversible sampler needs T_l == T_r > 0");
  constexpr std::size_t kProbe = 1'000'000;
  constexpr double kMinAcceptance = 1e-6;

  Engine rng = make_engine(seed, "reversible", 0);
  std::gamma_distribution<double> gamma(p.alpha, p.t_left);
  const auto n = static_cast<std::size_t>(p.n_sites);
  const double limit = (1.0 - kDomainTolerance) / p.sigma;

  ReversibleSamples out;
  out.samples.reserve(n_samples);
  EnergyConfig z(n);
  while (out.samples.size() < n_samples) {
    double total = 0.0;
    for (double& v : z) {
      v = gamma(rng);
      total += v;
    }
    ++out.proposals;
    if (total < limit) out.samples.push_back(map_g_inv(z, p));
    if (out.proposals == kProbe && out.acceptance_rate() < kMinAcceptance)
      throw RejectionStall("acceptance rate " +
                           std::to_string(out.acceptance_rate()) +
                           " below 1e-6; sigma * T too large");
  }
  return out;
}

}  // namespace abep
