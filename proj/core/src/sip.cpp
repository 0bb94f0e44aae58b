#include "abep/sip.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "abep/errors.hpp"

namespace abep {

ParticleConfig ParticleConfig::empty(int n_sites) {
  return ParticleConfig(std::vector<int>(static_cast<std::size_t>(n_sites) + 2, 0));
}

ParticleConfig ParticleConfig::from_sites(int n_sites,
                                          std::initializer_list<int> sites) {
  ParticleConfig c = empty(n_sites);
  for (int s : sites) {
    if (s < 0 || s > n_sites + 1)
      throw IndexError("site " + std::to_string(s) + " outside 0..N+1");
    ++c[s];
  }
  return c;
}

int ParticleConfig::total() const {
  return std::accumulate(xi.begin(), xi.end(), 0);
}

int ParticleConfig::bulk_count() const {
  return xi.size() < 2 ? 0 : total() - left() - right();
}

void validate_particles(const ParticleConfig& xi, int n_sites) {
  if (xi.n_sites() != n_sites)
    throw ParameterError("particle configuration must have N+2 entries");
  for (int v : xi.xi)
    if (v < 0) throw ParameterError("particle counts must be non-negative");
}

std::vector<SipMove> sip_moves(const ParticleConfig& xi, const SystemParams& p) {
  const int n = xi.n_sites();
  const double absorb = p.reservoir_rate();
  std::vector<SipMove> moves;
  if (xi[1] > 0) moves.push_back({1, 0, absorb * xi[1]});
  for (int i = 1; i < n; ++i) {
    if (xi[i] > 0) moves.push_back({i, i + 1, xi[i] * (p.alpha + xi[i + 1])});
    if (xi[i + 1] > 0)
      moves.push_back({i + 1, i, xi[i + 1] * (p.alpha + xi[i])});
  }
  if (xi[n] > 0) moves.push_back({n, n + 1, absorb * xi[n]});
  return moves;
}

std::vector<SipTransition> sip_rates(const ParticleConfig& xi,
                                     const SystemParams& p) {
  std::vector<SipTransition> out;
  for (const SipMove& m : sip_moves(xi, p)) {
    ParticleConfig target = xi;
    --target[m.from];
    ++target[m.to];
    out.push_back({std::move(target), m.rate});
  }
  return out;
}

namespace {

// Advances xi by Gillespie events until the bulk empties or `horizon` is
// reached. Returns the time of the last event (or the horizon).
double run_until(ParticleConfig& xi, const SystemParams& p, double horizon,
                 Engine& rng, std::size_t max_events, std::size_t& events) {
  std::exponential_distribution<double> clock(1.0);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  double t = 0.0;
  while (xi.bulk_count() > 0) {
    const auto moves = sip_moves(xi, p);
    double total = 0.0;
    for (const auto& m : moves) total += m.rate;
    const double wait = clock(rng) / total;
    if (t + wait > horizon) return horizon;
    t += wait;
    double u = pick(rng) * total;
    std::size_t k = 0;
    while (k + 1 < moves.size() && u >= moves[k].rate) u -= moves[k++].rate;
    --xi[moves[k].from];
    ++xi[moves[k].to];
    if (++events > max_events)
      throw SimulationCap("SIP run exceeded " + std::to_string(max_events) +
                          " events");
  }
  return t;
}

}  // namespace

GillespieResult gillespie_run(const ParticleConfig& xi0, const SystemParams& p,
                              Engine& rng, std::size_t max_events) {
  validate_particles(xi0, p.n_sites);
  GillespieResult r;
  r.final_state = xi0;
  r.absorption_time =
      run_until(r.final_state, p, INFINITY, rng, max_events, r.events);
  return r;
}

GillespieResult gillespie_run(const ParticleConfig& xi0, const SystemParams& p,
                              std::uint64_t seed, std::size_t max_events) {
  Engine rng = make_engine(seed, "gillespie", 0);
  return gillespie_run(xi0, p, rng, max_events);
}

ParticleConfig sip_evolve(const ParticleConfig& xi0, const SystemParams& p,
                          double t_horizon, Engine& rng,
                          std::size_t max_events) {
  validate_particles(xi0, p.n_sites);
  ParticleConfig xi = xi0;
  std::size_t events = 0;
  run_until(xi, p, t_horizon, rng, max_events, events);
  return xi;
}

AbsorptionEstimate mc_absorption(const ParticleConfig& xi0,
                                 const SystemParams& p, std::size_t n_runs,
                                 std::uint64_t seed, unsigned threads) {
  validate_particles(xi0, p.n_sites);
  const int total = xi0.total();
  // Fixed chunking keeps the per-run streams and the reduction order
  // independent of the worker count.
  constexpr std::size_t kChunk = 4096;
  const std::size_t n_chunks = (n_runs + kChunk - 1) / kChunk;
  std::vector<std::vector<std::size_t>> counts(
      n_chunks, std::vector<std::size_t>(static_cast<std::size_t>(total) + 1, 0));
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(n_runs, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) {
      Engine rng = make_engine(seed, "mc_absorption", k);
      const auto r = gillespie_run(xi0, p, rng);
      ++counts[c][static_cast<std::size_t>(r.final_state.left())];
    }
  });

  AbsorptionEstimate est;
  est.n_runs = n_runs;
  for (int left = 0; left <= total; ++left) {
    AbsorptionOutcome o;
    o.n_left = left;
    o.n_right = total - left;
    for (const auto& chunk : counts) o.count += chunk[static_cast<std::size_t>(left)];
    if (n_runs > 0) {
      const double n = static_cast<double>(n_runs);
      o.probability = static_cast<double>(o.count) / n;
      o.std_error = std::sqrt(o.probability * (1.0 - o.probability) / n);
    }
    est.outcomes.push_back(o);
  }
  return est;
}

}  // namespace abep
