#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "abep/generators.hpp"
#include "abep/model.hpp"
#include "abep/rng.hpp"
#include "abep/stats.hpp"

namespace abep {

struct SdeConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double burn_in = 0.0;
  double thinning = 0.1;
  std::uint64_t seed = 0;
  // Any component above this value (or non-finite) raises NumericalBlowup.
  double blowup_cap = 1e6;
  // Long runs only: on NumericalBlowup restart from x0, burn in again and keep
  // sampling instead of throwing. Restarts are reported by the estimator.
  bool restart_on_blowup = false;

  // Throws ParameterError unless dt < thinning <= t_end and burn_in <= t_end.
  void validate() const;
};

// One Euler-Maruyama step
//   x' = max(0, x + b(x) dt + sum_k sqrt(2 a_k(x) dt) noise_k v_k),
// with negative amplitudes clamped to 0 before the square root.
// `noise` holds one standard Gaussian per noise direction (N+1 of them).
EnergyConfig em_step(std::span<const double> x, const SystemParams& p,
                     Model model, double dt, std::span<const double> noise);

// Reusable integrator that keeps coefficient and noise buffers between steps.
class EulerMaruyama {
 public:
  EulerMaruyama(const SystemParams& p, Model model, double dt,
                double blowup_cap = 1e6);

  // Advances x in place by one step drawing noise from rng.
  void step(std::vector<double>& x, Engine& rng);
  // Same update with caller-supplied noise.
  void step(std::vector<double>& x, std::span<const double> noise);
  // Integrates from the current state over `duration` (rounded to whole
  // steps).
  void advance(std::vector<double>& x, double duration, Engine& rng);

  double dt() const { return dt_; }

 private:
  void check(std::span<const double> x) const;

  SystemParams params_;
  Model model_;
  double dt_;
  double cap_;
  DriftDiffusion coeffs_;
  std::vector<double> noise_;
  std::vector<double> increment_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct TrajectorySample {
  double time = 0.0;
  EnergyConfig state;
};

// States at burn_in + k * thinning (k >= 1) up to t_end, using the stream
// (cfg.seed, "trajectory", 0). Empty when t_end == burn_in.
std::vector<TrajectorySample> simulate_trajectory(std::span<const double> x0,
                                                  const SystemParams& p,
                                                  const SdeConfig& cfg,
                                                  Model model);

struct StationaryRun {
  std::vector<Estimate> estimates;  // one per observable
  std::size_t restarts = 0;         // blowups absorbed by restart_on_blowup
};

// Time-average estimates of several observables along one long trajectory
// started at x0, with batch-means standard errors. Uses the stream
// (cfg.seed, "stationary", 0).
StationaryRun stationary_estimates(
    std::span<const double> x0, const SystemParams& p, const SdeConfig& cfg,
    Model model, std::span<const ScalarField> observables,
    std::size_t n_batches = 32);

// Single-observable form; trajectory starts from the all-alpha*T_mean state.
Estimate stationary_estimate(const SystemParams& p, const SdeConfig& cfg,
                             Model model, const ScalarField& observable,
                             std::size_t n_batches = 32);

// Starting point used by stationary_estimate: BEP mean energies alpha*T_avg
// per site (mapped through g_inv for ABEP when inside g(Omega)).
EnergyConfig default_initial_state(const SystemParams& p, Model model);

}  // namespace abep
