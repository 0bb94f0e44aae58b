#include "abep/generators.hpp"

#include <cmath>

#include "abep/errors.hpp"

namespace abep {
namespace {

void reset(DriftDiffusion& out, std::size_t n) {
  out.drift.assign(n, 0.0);
  out.noise.resize(n + 1);
  for (auto& nd : out.noise) nd.direction.assign(n, 0.0);
}

}  // namespace

void bep_coefficients(std::span<const double> z, const SystemParams& p,
                      DriftDiffusion& out) {
  const std::size_t n = z.size();
  reset(out, n);
  const double rate = p.reservoir_rate();

  for (std::size_t k = 0; k + 1 < n; ++k) {
    auto& nd = out.noise[k];
    nd.amplitude = z[k] * z[k + 1];
    nd.direction[k] = -1.0;
    nd.direction[k + 1] = 1.0;
    const double flow = p.alpha * (z[k] - z[k + 1]);
    out.drift[k] -= flow;
    out.drift[k + 1] += flow;
  }

  auto& left = out.noise[n - 1];
  left.amplitude = rate * p.t_left * z[0];
  left.direction[0] = 1.0;
  out.drift[0] += rate * (p.t_left * p.alpha - z[0]);

  auto& right = out.noise[n];
  right.amplitude = rate * p.t_right * z[n - 1];
  right.direction[n - 1] = 1.0;
  out.drift[n - 1] += rate * (p.t_right * p.alpha - z[n - 1]);
}

void abep_coefficients(std::span<const double> x, const SystemParams& p,
                       DriftDiffusion& out) {
  const std::size_t n = x.size();
  reset(out, n);
  const double s = p.sigma;
  const double a = p.alpha;
  const double rate = p.reservoir_rate();

  // Bulk bonds act only on the pair and only through x_i, x_{i+1}.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double lose = -std::expm1(-s * x[k]);     // 1 - e^{-s x_i}
    const double gain = std::expm1(s * x[k + 1]);   // e^{s x_{i+1}} - 1
    const double prod = lose * gain;
    auto& nd = out.noise[k];
    nd.amplitude = prod / (s * s);
    nd.direction[k] = -1.0;
    nd.direction[k + 1] = 1.0;
    const double flow = (prod + a * (lose - gain)) / s;
    out.drift[k] -= flow;
    out.drift[k + 1] += flow;
  }

  // Partial energies E_l, 0-based: energy[k] = E_{k+1}.
  std::vector<double> energy(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) energy[k] = energy[k + 1] + x[k];

  // Left reservoir: local in x_1 but weighted by the total energy.
  {
    const double growth = std::exp(s * energy[0]);
    const double em1 = std::expm1(s * x[0]);
    auto& nd = out.noise[n - 1];
    nd.amplitude = rate * p.t_left * growth * em1 / s;
    nd.direction[0] = 1.0;
    out.drift[0] += rate * (p.t_left * growth * (a + em1) - em1 / s);
  }

  // Right reservoir attached at site N: rank-one direction given by column N
  // of the Jacobian of g_inv, with the second-derivative corrections of g_inv
  // in the drift.
  {
    const std::size_t last = n - 1;
    const double g_last = -std::expm1(-s * x[last]) / s;
    auto& nd = out.noise[n];
    nd.amplitude = rate * p.t_right * g_last;
    for (std::size_t l = 0; l < n; ++l) {
      const double growth = std::exp(s * energy[l]);
      const double v = l == last ? growth : -growth * std::expm1(-s * x[l]);
      const double w = l == last
                           ? growth * growth
                           : -growth * growth * std::expm1(-2.0 * s * x[l]);
      nd.direction[l] = v;
      out.drift[l] += rate * ((a * p.t_right - g_last) * v +
                              p.t_right * g_last * s * w);
    }
  }
}

void coefficients(Model model, std::span<const double> x,
                  const SystemParams& p, DriftDiffusion& out) {
  if (model == Model::kBep)
    bep_coefficients(x, p, out);
  else
    abep_coefficients(x, p, out);
}

DriftDiffusion bep_coefficients(std::span<const double> z,
                                const SystemParams& p) {
  DriftDiffusion out;
  bep_coefficients(z, p, out);
  return out;
}

DriftDiffusion abep_coefficients(std::span<const double> x,
                                 const SystemParams& p) {
  if (!(p.sigma > 0.0)) throw ParameterError("ABEP requires sigma > 0");
  DriftDiffusion out;
  abep_coefficients(x, p, out);
  return out;
}

DriftDiffusion coefficients(Model model, std::span<const double> x,
                            const SystemParams& p) {
  return model == Model::kBep ? bep_coefficients(x, p)
                              : abep_coefficients(x, p);
}

double apply_generator(const DriftDiffusion& coeffs, const ScalarField& f,
                       std::span<const double> x, double fd_step) {
  const std::size_t n = x.size();
  const double h = fd_step;
  std::vector<double> probe(x.begin(), x.end());
  double result = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double b = coeffs.drift[i];
    if (b == 0.0) continue;
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    result += b * (up - down) / (2.0 * h);
  }

  const double centre = f(x);
  for (const auto& nd : coeffs.noise) {
    if (nd.amplitude == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) probe[i] = x[i] + h * nd.direction[i];
    const double up = f(probe);
    for (std::size_t i = 0; i < n; ++i) probe[i] = x[i] - h * nd.direction[i];
    const double down = f(probe);
    result += nd.amplitude * (up - 2.0 * centre + down) / (h * h);
  }
  return result;
}

double intertwining_residual(std::span<const double> x, const SystemParams& p,
                             const ScalarField& f, double fd_step) {
  const ScalarField composed = [&](std::span<const double> y) {
    return f(map_g(y, p));
  };
  const EnergyConfig z = map_g(x, p);
  const double lhs = apply_generator(abep_coefficients(x, p), composed, x, fd_step);
  const double rhs = apply_generator(bep_coefficients(z, p), f, z, fd_step);
  return std::abs(lhs - rhs);
}

Eigen::MatrixXd abep_right_reservoir_diffusion(std::span<const double> x,
                                               const SystemParams& p) {
  const DriftDiffusion c = abep_coefficients(x, p);
  const auto& nd = c.noise.back();
  const Eigen::Map<const Eigen::VectorXd> v(nd.direction.data(),
                                            static_cast<Eigen::Index>(x.size()));
  return nd.amplitude * v * v.transpose();
}

}  // namespace abep
