#include "abep/duality.hpp"

#include <cmath>

#include "abep/errors.hpp"
#include "abep/generators.hpp"
#include "abep/sde.hpp"

namespace abep {

double rising_factorial(double alpha, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= alpha + j;
  return r;
}

double laguerre_d(double zeta, int k, double alpha, double t) {
  if (k < 0) throw ParameterError("laguerre_d degree must be >= 0");
  // d_{k+1} = [(zeta - T(2k + alpha)) d_k - k T^2 d_{k-1}] / (alpha + k)
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = zeta / alpha - t;
  for (int j = 1; j < k; ++j) {
    const double next =
        ((zeta - t * (2.0 * j + alpha)) * cur - j * t * t * prev) / (alpha + j);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

double int_pow(double base, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) r *= base;
  return r;
}

}  // namespace

double classical_D(std::span<const double> z, const ParticleConfig& xi,
                   const SystemParams& p) {
  const int n = xi.n_sites();
  double d = int_pow(p.t_left, xi.left()) * int_pow(p.t_right, xi.right());
  for (int i = 1; i <= n; ++i) {
    const int k = xi[i];
    if (k == 0) continue;
    d *= int_pow(z[static_cast<std::size_t>(i - 1)], k) /
         rising_factorial(p.alpha, k);
  }
  return d;
}

double orthogonal_D(std::span<const double> z, const ParticleConfig& xi,
                    const SystemParams& p, double t) {
  const int n = xi.n_sites();
  double d = int_pow(p.t_left - t, xi.left()) * int_pow(p.t_right - t, xi.right());
  for (int i = 1; i <= n; ++i) {
    const int k = xi[i];
    if (k == 0) continue;
    d *= laguerre_d(z[static_cast<std::size_t>(i - 1)], k, p.alpha, t);
  }
  return d;
}

double classical_D_sigma(std::span<const double> x, const ParticleConfig& xi,
                         const SystemParams& p) {
  return classical_D(map_g(x, p), xi, p);
}

double orthogonal_D_sigma(std::span<const double> x, const ParticleConfig& xi,
                          const SystemParams& p, double t) {
  return orthogonal_D(map_g(x, p), xi, p, t);
}

double duality_function(Model model, DualFunction dual,
                        std::span<const double> x, const ParticleConfig& xi,
                        const SystemParams& p, double t) {
  if (model == Model::kBep)
    return dual == DualFunction::kClassical ? classical_D(x, xi, p)
                                            : orthogonal_D(x, xi, p, t);
  return dual == DualFunction::kClassical ? classical_D_sigma(x, xi, p)
                                          : orthogonal_D_sigma(x, xi, p, t);
}

double apply_sip_generator(
    const std::function<double(const ParticleConfig&)>& f,
    const ParticleConfig& xi, const SystemParams& p) {
  const double here = f(xi);
  double result = 0.0;
  for (const auto& tr : sip_rates(xi, p)) result += tr.rate * (f(tr.target) - here);
  return result;
}

double GeneratorDualityResult::residual() const {
  return std::abs(continuous_side - discrete_side);
}

GeneratorDualityResult generator_duality(Model model, DualFunction dual,
                                         std::span<const double> x,
                                         const ParticleConfig& xi,
                                         const SystemParams& p, double t,
                                         double fd_step) {
  GeneratorDualityResult r;
  const ScalarField in_x = [&](std::span<const double> y) {
    return duality_function(model, dual, y, xi, p, t);
  };
  r.continuous_side = apply_generator(coefficients(model, x, p), in_x, x, fd_step);
  r.discrete_side = apply_sip_generator(
      [&](const ParticleConfig& eta) {
        return duality_function(model, dual, x, eta, p, t);
      },
      xi, p);
  return r;
}

std::vector<DualityCheck> semigroup_duality_check(
    std::span<const double> x0, std::span<const DualityQuery> queries,
    double t_horizon, const SystemParams& p, Model model,
    const DualityMcOptions& opts) {
  if (!(t_horizon >= 0.0)) throw ParameterError("t_horizon must be >= 0");
  validate_energies(x0, p.n_sites);
  for (const auto& q : queries) validate_particles(q.xi0, p.n_sites);

  const std::size_t nq = queries.size();
  constexpr std::size_t kChunk = 1024;
  const std::size_t n_chunks = (opts.n_runs + kChunk - 1) / kChunk;
  const double t_orth = opts.orthogonal_t;

  // lhs[chunk][query], rhs[chunk][query]; reduced in chunk order below.
  std::vector<std::vector<RunningStats>> lhs(n_chunks, std::vector<RunningStats>(nq));
  std::vector<std::vector<RunningStats>> rhs(n_chunks, std::vector<RunningStats>(nq));
  std::vector<std::size_t> blown(n_chunks, 0);

  parallel_for(n_chunks, opts.threads, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(opts.n_runs, begin + kChunk);
    EulerMaruyama em(p, model, opts.dt, opts.blowup_cap);
    std::vector<double> x;
    for (std::size_t k = begin; k < end; ++k) {
      Engine rng = make_engine(opts.seed, "duality-sde", k);
      x.assign(x0.begin(), x0.end());
      try {
        em.advance(x, t_horizon, rng);
      } catch (const NumericalBlowup&) {
        if (!opts.discard_blowups) throw;
        ++blown[c];
        continue;
      }
      for (std::size_t q = 0; q < nq; ++q)
        lhs[c][q].push(duality_function(model, queries[q].dual, x,
                                        queries[q].xi0, p, t_orth));
    }
    for (std::size_t q = 0; q < nq; ++q) {
      for (std::size_t k = begin; k < end; ++k) {
        Engine rng = make_engine(opts.seed, "duality-sip", q * opts.n_runs + k);
        const ParticleConfig xi = sip_evolve(queries[q].xi0, p, t_horizon, rng);
        rhs[c][q].push(duality_function(model, queries[q].dual, x0, xi, p, t_orth));
      }
    }
  });

  std::size_t blowups = 0;
  for (std::size_t b : blown) blowups += b;
  std::vector<DualityCheck> out(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    out[q].blowups = blowups;
    RunningStats l, r;
    for (std::size_t c = 0; c < n_chunks; ++c) {
      l.merge(lhs[c][q]);
      r.merge(rhs[c][q]);
    }
    out[q].lhs = l.estimate();
    out[q].rhs = r.estimate();
    out[q].z_score = z_score(out[q].lhs, out[q].rhs);
  }
  return out;
}

DualityCheck semigroup_duality_check(std::span<const double> x0,
                                     const ParticleConfig& xi0,
                                     double t_horizon, const SystemParams& p,
                                     Model model, DualFunction dual,
                                     const DualityMcOptions& opts) {
  const DualityQuery q[] = {{xi0, dual}};
  return semigroup_duality_check(x0, q, t_horizon, p, model, opts).front();
}

}  // namespace abep
