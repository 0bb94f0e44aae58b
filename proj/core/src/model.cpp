#include "abep/model.hpp"

#include <cmath>
#include <string>

#include "abep/errors.hpp"

namespace abep {

void SystemParams::validate() const {
  if (n_sites < 1) throw ParameterError("n_sites must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ParameterError("alpha must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw ParameterError("sigma must be non-negative");
  if (!(t_left >= 0.0) || !(t_right >= 0.0) || !std::isfinite(t_left) ||
      !std::isfinite(t_right))
    throw ParameterError("reservoir temperatures must be non-negative");
}

void SystemParams::validate_asymmetric() const {
  validate();
  if (!(sigma > 0.0)) throw ParameterError("ABEP requires sigma > 0");
}

PartialEnergies::PartialEnergies(std::span<const double> x)
    : values_(x.size() + 1, 0.0) {
  for (std::size_t k = x.size(); k-- > 0;) values_[k] = values_[k + 1] + x[k];
}

PartialEnergies partial_energies(std::span<const double> x) {
  return PartialEnergies(x);
}

void validate_energies(std::span<const double> x, int n_sites) {
  if (static_cast<int>(x.size()) != n_sites)
    throw ParameterError("energy vector has " + std::to_string(x.size()) +
                         " entries, expected " + std::to_string(n_sites));
  for (double v : x)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ParameterError("site energies must be finite and non-negative");
}

EnergyConfig map_g(std::span<const double> x, const SystemParams& p) {
  const double s = p.sigma;
  EnergyConfig z(x.size());
  // g_i = e^{-s E_{i+1}} (1 - e^{-s x_i}) / s, which avoids differencing two
  // nearly equal exponentials when s x_i is small.
  double tail = 0.0;  // E_{i+1}
  for (std::size_t k = x.size(); k-- > 0;) {
    z[k] = -std::exp(-s * tail) * std::expm1(-s * x[k]) / s;
    tail += x[k];
  }
  return z;
}

EnergyConfig map_g_inv(std::span<const double> z, const SystemParams& p) {
  const double s = p.sigma;
  double total = 0.0;
  for (double v : z) total += v;
  if (s * total >= 1.0 - kDomainTolerance)
    throw DomainError("z lies outside g(Omega): sigma * E_1(z) = " +
                      std::to_string(s * total));
  EnergyConfig x(z.size());
  // w = 1 - s E_{i+1}(z), accumulated from the right.
  double w = 1.0;
  for (std::size_t k = z.size(); k-- > 0;) {
    const double w_next = w - s * z[k];  // 1 - s E_i(z)
    x[k] = std::log1p(s * z[k] / w_next) / s;
    w = w_next;
  }
  return x;
}

Eigen::MatrixXd jacobian_g_inv(std::span<const double> z,
                               const SystemParams& p) {
  const EnergyConfig x = map_g_inv(z, p);
  const PartialEnergies e(x);
  const int n = static_cast<int>(x.size());
  const double s = p.sigma;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l < n; ++l) {
    const double growth = std::exp(s * e[l + 1]);
    jac(l, l) = growth;
    const double off = -growth * std::expm1(-s * x[static_cast<std::size_t>(l)]);
    for (int k = l + 1; k < n; ++k) jac(l, k) = off;
  }
  return jac;
}

}  // namespace abep
