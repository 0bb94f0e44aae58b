#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "abep/model.hpp"
#include "abep/sip.hpp"
#include "abep/stats.hpp"

namespace abep {

// Single-site orthogonal factor d(zeta, k) = (-T)^k 1F1(-k; alpha; zeta/T),
// evaluated by the three-term Laguerre recurrence.
double laguerre_d(double zeta, int k, double alpha, double t);

// Rising factorial alpha (alpha+1) ... (alpha+k-1) = Gamma(alpha+k)/Gamma(alpha).
double rising_factorial(double alpha, int k);

// T_l^{xi_0} prod_i z_i^{xi_i} Gamma(alpha)/Gamma(alpha+xi_i) T_r^{xi_{N+1}}.
double classical_D(std::span<const double> z, const ParticleConfig& xi,
                   const SystemParams& p);

// (T_l-T)^{xi_0} prod_i d(z_i, xi_i) (T_r-T)^{xi_{N+1}}.
double orthogonal_D(std::span<const double> z, const ParticleConfig& xi,
                    const SystemParams& p, double t);

// The asymmetric versions evaluate the symmetric ones at g(x).
double classical_D_sigma(std::span<const double> x, const ParticleConfig& xi,
                         const SystemParams& p);
double orthogonal_D_sigma(std::span<const double> x, const ParticleConfig& xi,
                          const SystemParams& p, double t);

enum class DualFunction { kClassical, kOrthogonal };

// Duality function between `model` and SIP: the symmetric form for BEP, the
// g-composed form for ABEP. `t` is only used by kOrthogonal.
double duality_function(Model model, DualFunction dual,
                        std::span<const double> x, const ParticleConfig& xi,
                        const SystemParams& p, double t);

// Exact action of the absorbing SIP generator on f at xi.
double apply_sip_generator(
    const std::function<double(const ParticleConfig&)>& f,
    const ParticleConfig& xi, const SystemParams& p);

struct GeneratorDualityResult {
  double continuous_side = 0.0;  // L acting on D(., xi) at x (finite differences)
  double discrete_side = 0.0;    // L^SIP acting on D(x, .) at xi (exact)
  double residual() const;
};

GeneratorDualityResult generator_duality(Model model, DualFunction dual,
                                         std::span<const double> x,
                                         const ParticleConfig& xi,
                                         const SystemParams& p, double t,
                                         double fd_step);

struct DualityQuery {
  ParticleConfig xi0;
  DualFunction dual = DualFunction::kClassical;
};

struct DualityCheck {
  Estimate lhs;  // E_x0[D(X_t, xi0)] over SDE runs
  Estimate rhs;  // E_xi0[D(x0, Xi_t)] over SIP runs
  double z_score = 0.0;
  std::size_t blowups = 0;  // discarded SDE paths
};

struct DualityMcOptions {
  std::size_t n_runs = 100'000;
  double dt = 1e-3;
  double orthogonal_t = 1.0;  // T parameter of the orthogonal function
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double blowup_cap = 1e6;
  // Drop SDE paths that hit the cap instead of throwing NumericalBlowup.
  bool discard_blowups = false;
};

// Two-sided Monte Carlo of E_x[D(X_t, xi)] = E_xi[D(x, Xi_t)]. All queries
// share the same SDE trajectories; each query gets its own SIP runs. SDE run
// k uses stream (seed, "duality-sde", k); SIP run k of query q uses
// (seed, "duality-sip", q * n_runs + k).
std::vector<DualityCheck> semigroup_duality_check(
    std::span<const double> x0, std::span<const DualityQuery> queries,
    double t_horizon, const SystemParams& p, Model model,
    const DualityMcOptions& opts);

DualityCheck semigroup_duality_check(std::span<const double> x0,
                                     const ParticleConfig& xi0,
                                     double t_horizon, const SystemParams& p,
                                     Model model, DualFunction dual,
                                     const DualityMcOptions& opts);

}  // namespace abep
