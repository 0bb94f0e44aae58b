#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abep/model.hpp"

namespace abep {

// Stationary E[exp(-sigma E_m)]:
//   1 - sigma alpha T_l (N-m+1) + sigma alpha (T_r-T_l)(m+N)(m-N-1)/(2(N+1)).
double one_point_moment(int m, const SystemParams& p);

// 1 - sum_{i=m}^{N} sigma alpha (T_l + (T_r - T_l) i/(N+1)).
double one_point_telescoping(int m, const SystemParams& p);

// 1 - sum_{i=m}^{N} sigma alpha (T_l P_i(left) + T_r P_i(right)) with the
// absorption probabilities from the harmonic solve. Valid for either
// reservoir coupling.
double one_point_absorption_route(int m, const SystemParams& p);

struct TwoPointMoment {
  // One-point terms plus the sum over dual pairs of absorption-weighted
  // temperature products; off-diagonal pairs weigh (sigma alpha)^2, coincident
  // pairs alpha (alpha+1) sigma^2.
  double assembly = 0.0;
  // Literal evaluation of the published closed-form display.
  double closed_form_display = 0.0;
  double difference() const { return closed_form_display - assembly; }
};

// Stationary E[exp(-sigma E_m) exp(-sigma E_n)] for m <= n.
TwoPointMoment two_point_moment(int m, int n, const SystemParams& p);

// Published closed-form display on its own.
double two_point_closed_form_display(int m, int n, const SystemParams& p);

// Log of the (unnormalised) equal-temperature reversible density
//   exp((e^{-sigma E} - 1)/(sigma T)) prod_i (1-e^{-sigma x_i})^{alpha-1}
//       e^{-sigma x_i (alpha (i-1) + 1)} / (Gamma(alpha) sigma^{alpha-1} T^alpha).
// Throws ParameterError unless T_l == T_r > 0.
double log_reversible_density(std::span<const double> x, const SystemParams& p);
double reversible_density_unnormalized(std::span<const double> x,
                                       const SystemParams& p);

struct ReversibleSamples {
  std::vector<EnergyConfig> samples;
  std::size_t proposals = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 0.0
                          : static_cast<double>(samples.size()) /
                                static_cast<double>(proposals);
  }
};

// Pushforward sampler: z ~ prod Gamma(alpha, T), kept when sigma E_1(z) < 1,
// returned as g_inv(z). Uses stream (seed, "reversible", 0).
// Throws RejectionStall when the acceptance rate is below 1e-6 after a probe
// batch of 10^6 proposals.
ReversibleSamples reversible_sampler(const SystemParams& p,
                                     std::size_t n_samples, std::uint64_t seed);

}  // namespace abep
