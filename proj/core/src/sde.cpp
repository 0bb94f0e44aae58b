#include "abep/sde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "abep/errors.hpp"

namespace abep {

void SdeConfig::validate() const {
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  if (!(thinning > dt)) throw ParameterError("thinning must exceed dt");
  if (!(thinning <= t_end)) throw ParameterError("thinning must not exceed t_end");
  if (!(burn_in >= 0.0) || burn_in > t_end)
    throw ParameterError("burn_in must lie in [0, t_end]");
  if (!(blowup_cap > 0.0)) throw ParameterError("blowup_cap must be positive");
}

EulerMaruyama::EulerMaruyama(const SystemParams& p, Model model, double dt,
                             double blowup_cap)
    : params_(p), model_(model), dt_(dt), cap_(blowup_cap) {
  if (model == Model::kAbep)
    p.validate_asymmetric();
  else
    p.validate();
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  noise_.resize(static_cast<std::size_t>(p.n_sites) + 1);
}

void EulerMaruyama::check(std::span<const double> x) const {
  for (double v : x)
    if (!(v <= cap_))  // also catches NaN
      throw NumericalBlowup("state component " + std::to_string(v) +
                            " exceeded cap " + std::to_string(cap_) +
                            "; reduce dt");
}

void EulerMaruyama::step(std::vector<double>& x,
                         std::span<const double> noise) {
  coefficients(model_, x, params_, coeffs_);
  const std::size_t n = x.size();
  // Increments are formed from the pre-step state, then applied.
  std::vector<double>& inc = increment_;
  inc.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inc[i] = coeffs_.drift[i] * dt_;
  for (std::size_t k = 0; k < coeffs_.noise.size(); ++k) {
    const auto& nd = coeffs_.noise[k];
    const double a = std::max(nd.amplitude, 0.0);
    if (a == 0.0 || noise[k] == 0.0) continue;
    const double scale = std::sqrt(2.0 * a * dt_) * noise[k];
    for (std::size_t i = 0; i < n; ++i) inc[i] += scale * nd.direction[i];
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(0.0, x[i] + inc[i]);
  check(x);
}

void EulerMaruyama::step(std::vector<double>& x, Engine& rng) {
  for (double& w : noise_) w = normal_(rng);
  step(x, noise_);
}

void EulerMaruyama::advance(std::vector<double>& x, double duration,
                            Engine& rng) {
  const auto steps = static_cast<long long>(std::llround(duration / dt_));
  for (long long s = 0; s < steps; ++s) step(x, rng);
}

EnergyConfig em_step(std::span<const double> x, const SystemParams& p,
                     Model model, double dt, std::span<const double> noise) {
  if (noise.size() != x.size() + 1)
    throw ParameterError("em_step expects one noise value per direction");
  EulerMaruyama integrator(p, model, dt, INFINITY);
  EnergyConfig out(x.begin(), x.end());
  integrator.step(out, noise);
  return out;
}

namespace {

// Calls visit(time, state) at burn_in + k * thinning for k >= 1.
// Returns the number of restarts.
template <class Visit>
std::size_t run_sampled(std::span<const double> x0, const SystemParams& p,
                        const SdeConfig& cfg, Model model, Engine& rng,
                        Visit visit) {
  cfg.validate();
  validate_energies(x0, p.n_sites);
  EulerMaruyama em(p, model, cfg.dt, cfg.blowup_cap);
  std::vector<double> x(x0.begin(), x0.end());
  const auto steps_per_sample =
      std::max<long long>(1, std::llround(cfg.thinning / cfg.dt));
  const auto burn_steps = std::llround(cfg.burn_in / cfg.dt);
  const auto total_steps = std::llround(cfg.t_end / cfg.dt);
  std::size_t restarts = 0;

  auto burn = [&] {
    for (long long s = 0; s < burn_steps; ++s) em.step(x, rng);
  };
  // A restart discards the interrupted sampling interval and burns in again;
  // the burn-in after a restart does not advance the sampling clock.
  auto recover = [&](const NumericalBlowup&) {
    if (!cfg.restart_on_blowup) throw;
    ++restarts;
    x.assign(x0.begin(), x0.end());
  };
  for (;;) {
    try {
      burn();
      break;
    } catch (const NumericalBlowup& e) {
      recover(e);
    }
  }
  long long done = burn_steps;
  while (done + steps_per_sample <= total_steps) {
    try {
      for (long long s = 0; s < steps_per_sample; ++s) em.step(x, rng);
    } catch (const NumericalBlowup& e) {
      recover(e);
      for (;;) {
        try {
          burn();
          break;
        } catch (const NumericalBlowup& again) {
          recover(again);
        }
      }
      continue;
    }
    done += steps_per_sample;
    visit(static_cast<double>(done) * cfg.dt, x);
  }
  return restarts;
}

}  // namespace

std::vector<TrajectorySample> simulate_trajectory(std::span<const double> x0,
                                                  const SystemParams& p,
                                                  const SdeConfig& cfg,
                                                  Model model) {
  Engine rng = make_engine(cfg.seed, "trajectory", 0);
  std::vector<TrajectorySample> out;
  run_sampled(x0, p, cfg, model, rng,
              [&](double t, const std::vector<double>& x) {
                out.push_back({t, x});
              });
  return out;
}

StationaryRun stationary_estimates(
    std::span<const double> x0, const SystemParams& p, const SdeConfig& cfg,
    Model model, std::span<const ScalarField> observables,
    std::size_t n_batches) {
  Engine rng = make_engine(cfg.seed, "stationary", 0);
  std::vector<std::vector<double>> series(observables.size());
  StationaryRun out;
  out.restarts = run_sampled(x0, p, cfg, model, rng,
                             [&](double, const std::vector<double>& x) {
                               for (std::size_t k = 0; k < observables.size(); ++k)
                                 series[k].push_back(observables[k](x));
                             });
  out.estimates.reserve(observables.size());
  for (const auto& s : series) out.estimates.push_back(batch_means(s, n_batches));
  return out;
}

EnergyConfig default_initial_state(const SystemParams& p, Model model) {
  const double t_avg = 0.5 * (p.t_left + p.t_right);
  EnergyConfig z(static_cast<std::size_t>(p.n_sites), p.alpha * t_avg);
  if (model == Model::kBep) return z;
  double total = 0.0;
  for (double v : z) total += v;
  // Shrink into g(Omega) if the BEP mean state lies outside it.
  if (p.sigma * total >= 0.5)
    for (double& v : z) v *= 0.5 / (p.sigma * total);
  return map_g_inv(z, p);
}

Estimate stationary_estimate(const SystemParams& p, const SdeConfig& cfg,
                             Model model, const ScalarField& observable,
                             std::size_t n_batches) {
  const EnergyConfig x0 = default_initial_state(p, model);
  const ScalarField obs[] = {observable};
  return stationary_estimates(x0, p, cfg, model, obs, n_batches).estimates.front();
}

}  // namespace abep
