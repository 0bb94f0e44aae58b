#pragma once

#include <cstdint>
#include <vector>

#include "abep/model.hpp"
#include "abep/rng.hpp"
#include "abep/stats.hpp"

namespace abep {

// Occupations xi_0..xi_{N+1}; sites 0 and N+1 are absorbing.
struct ParticleConfig {
  std::vector<int> xi;

  ParticleConfig() = default;
  explicit ParticleConfig(std::vector<int> counts) : xi(std::move(counts)) {}
  // Empty configuration on N bulk sites.
  static ParticleConfig empty(int n_sites);
  // Configuration with one particle at each listed site (repeats allowed).
  static ParticleConfig from_sites(int n_sites, std::initializer_list<int> sites);

  int n_sites() const { return static_cast<int>(xi.size()) - 2; }
  int& operator[](int site) { return xi[static_cast<std::size_t>(site)]; }
  int operator[](int site) const { return xi[static_cast<std::size_t>(site)]; }
  int total() const;
  int bulk_count() const;
  int left() const { return xi.front(); }
  int right() const { return xi.back(); }

  friend bool operator==(const ParticleConfig&, const ParticleConfig&) = default;
};

// Throws ParameterError for negative counts or a size other than N+2.
void validate_particles(const ParticleConfig& xi, int n_sites);

// A single particle moving from `from` to `to` at `rate`.
struct SipMove {
  int from = 0;
  int to = 0;
  double rate = 0.0;
};

struct SipTransition {
  ParticleConfig target;
  double rate = 0.0;
};

// Every move with positive rate: bulk i -> i+1 at xi_i (alpha + xi_{i+1}),
// i+1 -> i at xi_{i+1} (alpha + xi_i), and absorption 1 -> 0, N -> N+1 at
// reservoir_rate() * occupancy. Ordered by bond, left absorption first.
std::vector<SipMove> sip_moves(const ParticleConfig& xi, const SystemParams& p);
std::vector<SipTransition> sip_rates(const ParticleConfig& xi,
                                     const SystemParams& p);

struct GillespieResult {
  ParticleConfig final_state;
  double absorption_time = 0.0;
  std::size_t events = 0;
};

inline constexpr std::size_t kDefaultMaxEvents = 100'000'000;

// Runs until the bulk is empty. Throws SimulationCap after max_events.
GillespieResult gillespie_run(const ParticleConfig& xi0, const SystemParams& p,
                              Engine& rng,
                              std::size_t max_events = kDefaultMaxEvents);
GillespieResult gillespie_run(const ParticleConfig& xi0, const SystemParams& p,
                              std::uint64_t seed,
                              std::size_t max_events = kDefaultMaxEvents);

// State at time t_horizon (not necessarily absorbed).
ParticleConfig sip_evolve(const ParticleConfig& xi0, const SystemParams& p,
                          double t_horizon, Engine& rng,
                          std::size_t max_events = kDefaultMaxEvents);

// Empirical frequency of one absorption outcome (xi_0, xi_{N+1}).
struct AbsorptionOutcome {
  int n_left = 0;
  int n_right = 0;
  std::size_t count = 0;
  double probability = 0.0;
  double std_error = 0.0;  // binomial
};

struct AbsorptionEstimate {
  std::size_t n_runs = 0;
  std::vector<AbsorptionOutcome> outcomes;  // indexed by n_left, 0..total

  // Frequency of exactly `n_left` particles absorbed on the left.
  const AbsorptionOutcome& left_count(int n_left) const {
    return outcomes.at(static_cast<std::size_t>(n_left));
  }
};

// Monte Carlo absorption statistics over n_runs independent Gillespie runs.
// Run k uses stream (seed, "mc_absorption", k), so results do not depend on
// `threads`.
AbsorptionEstimate mc_absorption(const ParticleConfig& xi0,
                                 const SystemParams& p, std::size_t n_runs,
                                 std::uint64_t seed, unsigned threads = 1);

}  // namespace abep
