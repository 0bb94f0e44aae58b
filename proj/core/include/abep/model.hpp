#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace abep {

// How strongly the reservoirs (and, dually, the absorbing sites) couple to
// the boundary sites.
//
// kAlpha: a dual particle on a boundary site is absorbed at rate alpha, the
//   same rate as a jump to an empty bulk neighbour; every reservoir term of
//   the BEP/ABEP generators carries the matching factor alpha. The two-particle
//   absorption closed forms and the linear one-point profile hold for this
//   convention.
// kUnit: absorption at rate 1 per particle and unscaled reservoir terms.
//   Duality still holds, but absorption probabilities are no longer linear
//   in the starting site unless alpha == 1.
enum class ReservoirCoupling { kAlpha, kUnit };

enum class Model { kBep, kAbep };

struct SystemParams {
  int n_sites = 1;
  double sigma = 0.0;
  double alpha = 1.0;
  double t_left = 0.0;
  double t_right = 0.0;
  ReservoirCoupling coupling = ReservoirCoupling::kAlpha;

  // Rate multiplying every reservoir / absorption term.
  double reservoir_rate() const {
    return coupling == ReservoirCoupling::kAlpha ? alpha : 1.0;
  }

  // Throws ParameterError unless n_sites >= 1, alpha > 0, temperatures >= 0
  // and sigma >= 0.
  void validate() const;
  // validate() plus sigma > 0.
  void validate_asymmetric() const;
};

// Site energies x_1..x_N; element k stores site k+1.
using EnergyConfig = std::vector<double>;

// E_i(x) = sum_{l >= i} x_l for i = 1..N+1, with E_{N+1} = 0.
class PartialEnergies {
 public:
  explicit PartialEnergies(std::span<const double> x);

  // 1-based site index, 1 <= site <= N+1.
  double operator[](int site) const {
    return values_[static_cast<std::size_t>(site - 1)];
  }
  double total() const { return values_.front(); }
  int n_sites() const { return static_cast<int>(values_.size()) - 1; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

PartialEnergies partial_energies(std::span<const double> x);

// Throws ParameterError if any component is negative or not finite.
void validate_energies(std::span<const double> x, int n_sites);

// g_i(x) = (exp(-sigma E_{i+1}(x)) - exp(-sigma E_i(x))) / sigma.
EnergyConfig map_g(std::span<const double> x, const SystemParams& p);

// Inverse of map_g on g(Omega) = { z : sigma E_1(z) < 1 }.
// Throws DomainError when sigma E_1(z) >= 1 - kDomainTolerance.
EnergyConfig map_g_inv(std::span<const double> z, const SystemParams& p);

// d g_inv_l / d z_k as an N x N matrix (row l, column k), upper triangular.
Eigen::MatrixXd jacobian_g_inv(std::span<const double> z,
                               const SystemParams& p);

inline constexpr double kDomainTolerance = 1e-12;

}  // namespace abep
