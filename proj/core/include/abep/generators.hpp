#pragma once

#include <functional>
#include <span>
#include <vector>

#include "abep/model.hpp"

namespace abep {

// One rank-one second-order term a * (v . grad)^2.
struct NoiseDirection {
  double amplitude = 0.0;
  std::vector<double> direction;
};

// Coefficients of L = sum_i drift_i d_i + sum_k a_k (v_k . grad)^2.
// The matching SDE has noise sqrt(2 a_k) dW_k along v_k.
//
// Noise directions are ordered: bulk bonds (1,2), ..., (N-1,N), then the left
// reservoir, then the right reservoir, N+1 entries in total.
struct DriftDiffusion {
  std::vector<double> drift;
  std::vector<NoiseDirection> noise;
};

DriftDiffusion bep_coefficients(std::span<const double> z,
                                const SystemParams& p);
DriftDiffusion abep_coefficients(std::span<const double> x,
                                 const SystemParams& p);
DriftDiffusion coefficients(Model model, std::span<const double> x,
                            const SystemParams& p);

// In-place variants reuse the buffers of `out`; used on the SDE hot path.
void bep_coefficients(std::span<const double> z, const SystemParams& p,
                      DriftDiffusion& out);
void abep_coefficients(std::span<const double> x, const SystemParams& p,
                       DriftDiffusion& out);
void coefficients(Model model, std::span<const double> x,
                  const SystemParams& p, DriftDiffusion& out);

using ScalarField = std::function<double(std::span<const double>)>;

// Applies the operator described by `coeffs` to f at x with central finite
// differences of step fd_step (first derivatives per coordinate, second
// derivatives along every noise direction).
double apply_generator(const DriftDiffusion& coeffs, const ScalarField& f,
                       std::span<const double> x, double fd_step);

// |L^ABEP (f o g)(x) - (L^BEP f)(g(x))|, both sides by finite differences.
double intertwining_residual(std::span<const double> x, const SystemParams& p,
                             const ScalarField& f, double fd_step);

// Right-reservoir second-order part of the ABEP generator expanded to a dense
// N x N matrix (sum over its rank-one factors).
Eigen::MatrixXd abep_right_reservoir_diffusion(std::span<const double> x,
                                               const SystemParams& p);

}  // namespace abep
