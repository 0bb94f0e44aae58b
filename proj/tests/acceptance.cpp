// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "abep/absorption.hpp"
#include "abep/duality.hpp"
#include "abep/errors.hpp"
#include "abep/generators.hpp"
#include "abep/moments.hpp"
#include "abep/sde.hpp"
#include "abep/sip.hpp"
#include "abep/stats.hpp"

using namespace abep;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  Clock::time_point start = Clock::now();
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (cond ? "" : " [!]");
  }

  ~Criterion() {
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs > budget_s) {
      ok = false;
      detail += "; runtime over budget";
    }
    std::printf("%s [%d] %s: %s (%.1f s, budget %.0f s)\n", ok ? "PASS" : "FAIL", id, name,
                detail.c_str(), secs, budget_s);
    std::fflush(stdout);
    if (!ok) ++g_failures;
  }
};

void info(const std::string& text) {
  std::printf("INFO %s\n", text.c_str());
  std::fflush(stdout);
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

SystemParams params(int n, double sigma, double alpha, double tl, double tr) {
  SystemParams p;
  p.n_sites = n;
  p.sigma = sigma;
  p.alpha = alpha;
  p.t_left = tl;
  p.t_right = tr;
  return p;
}

double exp_energy(std::span<const double> x, double sigma, int m) {
  double e = 0.0;
  for (std::size_t k = static_cast<std::size_t>(m - 1); k < x.size(); ++k) e += x[k];
  return std::exp(-sigma * e);
}

// Monomials of degree 0..3 in three variables.
std::vector<ScalarField> cubic_monomials() {
  std::vector<ScalarField> out;
  out.push_back([](std::span<const double>) { return 1.0; });
  for (int a = 0; a < 3; ++a) {
    out.push_back([a](std::span<const double> z) { return z[a]; });
    for (int b = a; b < 3; ++b) {
      out.push_back([a, b](std::span<const double> z) { return z[a] * z[b]; });
      for (int c = b; c < 3; ++c)
        out.push_back([a, b, c](std::span<const double> z) { return z[a] * z[b] * z[c]; });
    }
  }
  return out;
}

std::vector<ParticleConfig> configs_up_to(int n, int max_particles) {
  std::vector<ParticleConfig> out;
  std::vector<int> xi(static_cast<std::size_t>(n + 2), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t site, int left) {
    if (site == xi.size()) {
      out.emplace_back(xi);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      xi[site] = c;
      rec(site + 1, left - c);
    }
    xi[site] = 0;
  };
  rec(0, max_particles);
  return out;
}

void criterion_intertwining() {
  Criterion c{1, "intertwining", 10};
  const auto fs = cubic_monomials();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (double sigma : {0.1, 0.5}) {
    const SystemParams p = params(3, sigma, 1.0, 1.0, 2.0);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      const EnergyConfig x{u(rng), u(rng), u(rng)};
      for (const auto& f : fs) worst = std::max(worst, intertwining_residual(x, p, f, 1e-4));
    }
    c.require(worst < 1e-4, fmt("sigma=%g max residual %.3e < 1e-4", sigma, worst));
  }
}

void criterion_round_trip() {
  Criterion c{2, "map round trip", 1};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (double sigma : {0.1, 0.5}) {
    const SystemParams p = params(3, sigma, 1.0, 1.0, 1.0);
    double worst = 0.0;
    bool bounded = true;
    for (int s = 0; s < 10000; ++s) {
      const EnergyConfig x{u(rng), u(rng), u(rng)};
      const EnergyConfig z = map_g(x, p);
      bounded = bounded && sigma * (z[0] + z[1] + z[2]) < 1.0;
      const EnergyConfig back = map_g_inv(z, p);
      for (std::size_t k = 0; k < 3; ++k) worst = std::max(worst, std::abs(back[k] - x[k]));
    }
    c.require(worst < 1e-12, fmt("sigma=%g max |g_inv(g(x)) - x| %.3e < 1e-12", sigma, worst));
    c.require(bounded, fmt("sigma=%g image bound holds", sigma));
  }
}

void criterion_generator_duality() {
  Criterion c{3, "generator duality", 30};
  const auto all = configs_up_to(2, 3);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (Model model : {Model::kBep, Model::kAbep}) {
    for (DualFunction dual : {DualFunction::kClassical, DualFunction::kOrthogonal}) {
      double worst = 0.0;
      for (double sigma : {0.1, 0.5})
        for (double alpha : {0.5, 1.0, 2.0}) {
          const SystemParams p = params(2, sigma, alpha, 0.8, 1.6);
          const double t = 0.5 * (p.t_left + p.t_right);
          for (int s = 0; s < 10; ++s) {
            const EnergyConfig x{u(rng), u(rng)};
            for (const auto& xi : all)
              worst = std::max(worst, generator_duality(model, dual, x, xi, p, t, 1e-4).residual());
          }
        }
      c.require(worst < 1e-4,
                fmt("%s/%s max residual %.3e", model == Model::kBep ? "BEP" : "ABEP",
                    dual == DualFunction::kClassical ? "classical" : "orthogonal", worst));
    }
  }
}

void criterion_semigroup_duality() {
  Criterion c{4, "semigroup duality", 300};
  const SystemParams p = params(2, 0.1, 1.0, 0.5, 1.0);
  const EnergyConfig x0{0.4, 0.7};
  const DualityQuery queries[] = {
      {ParticleConfig::from_sites(2, {1}), DualFunction::kClassical},
      {ParticleConfig::from_sites(2, {1, 2}), DualFunction::kClassical},
      {ParticleConfig::from_sites(2, {1}), DualFunction::kOrthogonal},
      {ParticleConfig::from_sites(2, {1, 2}), DualFunction::kOrthogonal},
  };
  const char* names[] = {"classical d1", "classical d1+d2", "orthogonal d1", "orthogonal d1+d2"};
  DualityMcOptions opts;
  opts.n_runs = 100000;
  opts.seed = 11;
  opts.threads = default_threads();
  opts.orthogonal_t = 0.5 * (p.t_left + p.t_right);
  for (Model model : {Model::kBep, Model::kAbep}) {
    const char* mn = model == Model::kBep ? "BEP" : "ABEP";
    for (double dt : {1e-3, 5e-4}) {
      opts.dt = dt;
      const auto r = semigroup_duality_check(x0, queries, 0.5, p, model, opts);
      for (std::size_t q = 0; q < r.size(); ++q) {
        const std::string line =
            fmt("%s %s dt=%g lhs %.5f+-%.5f rhs %.5f+-%.5f z=%.2f", mn, names[q], dt,
                r[q].lhs.mean, r[q].lhs.std_error, r[q].rhs.mean, r[q].rhs.std_error,
                r[q].z_score);
        if (dt == 5e-4)
          c.require(r[q].z_score < 3.0, line);
        else
          info("[4] " + line);
      }
    }
  }
}

void criterion_absorption() {
  Criterion c{5, "absorption oracles", 120};
  double worst = 0.0, worst_sum = 0.0;
  for (double alpha : {0.5, 1.0, 2.0})
    for (int n = 1; n <= 6; ++n) {
      const SystemParams p = params(n, 0.0, alpha, 1.0, 1.0);
      for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
          const auto sv = two_particle_solve(i, j, p);
          const auto cf = two_particle_closed_form(i, j, p);
          worst = std::max({worst, std::abs(sv.p_both_left - cf.p_both_left),
                            std::abs(sv.p_both_right - cf.p_both_right),
                            std::abs(sv.p_split - cf.p_split)});
          worst_sum = std::max({worst_sum, std::abs(sv.sum() - 1.0), std::abs(cf.sum() - 1.0)});
        }
    }
  c.require(worst < 1e-10, fmt("closed form vs solve max diff %.3e < 1e-10", worst));
  c.require(worst_sum < 1e-12, fmt("max |sum - 1| %.3e < 1e-12", worst_sum));

  const auto base = two_particle_solve(1, 1, params(1, 0.0, 1.0, 1.0, 1.0));
  const double dev = std::max({std::abs(base.p_both_left - 0.25), std::abs(base.p_both_right - 0.25),
                               std::abs(base.p_split - 0.5)});
  c.require(dev <= 2.0 * std::numeric_limits<double>::epsilon(),
            fmt("N=1 i=j=1 solve (%.17g, %.17g, %.17g)", base.p_both_left, base.p_both_right,
                base.p_split));

  struct Case {
    int n, i, j;
    double alpha;
  };
  double worst_z = 0.0;
  bool ok = true;
  for (const Case k : {Case{1, 1, 1, 1.0}, Case{3, 1, 2, 0.5}, Case{5, 2, 4, 2.0}, Case{4, 3, 3, 1.0}}) {
    const SystemParams p = params(k.n, 0.0, k.alpha, 1.0, 1.0);
    const auto exact = two_particle_solve(k.i, k.j, p);
    const auto est = mc_absorption(ParticleConfig::from_sites(k.n, {k.i, k.j}), p, 100000,
                                   static_cast<std::uint64_t>(100 + k.n * 10 + k.i),
                                   default_threads());
    const double want[3] = {exact.p_both_right, exact.p_split, exact.p_both_left};
    for (int left = 0; left <= 2; ++left) {
      const auto& o = est.left_count(left);
      const double z = std::abs(o.probability - want[left]) / o.std_error;
      worst_z = std::max(worst_z, z);
      ok = ok && z < 3.0;
    }
  }
  c.require(ok, fmt("Gillespie 1e5 runs max z %.2f < 3", worst_z));
}

void criterion_one_point() {
  Criterion c{6, "one-point moments", 600};
  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 2.0})
    for (int n = 1; n <= 10; ++n) {
      const SystemParams p = params(n, 0.1, alpha, 0.5, 2.0);
      for (int m = 1; m <= n; ++m) {
        const double cf = one_point_moment(m, p);
        worst = std::max({worst, std::abs(cf - one_point_telescoping(m, p)),
                          std::abs(cf - one_point_absorption_route(m, p))});
      }
    }
  c.require(worst < 1e-12, fmt("three routes max diff %.3e < 1e-12", worst));

  for (int n : {1, 2}) {
    const SystemParams p = params(n, 0.1, 1.0, 0.5, 1.0);
    std::vector<ScalarField> obs;
    for (int m = 1; m <= n; ++m)
      obs.push_back([m](std::span<const double> x) { return exp_energy(x, 0.1, m); });
    for (double dt : {2e-3, 1e-3}) {
      SdeConfig cfg;
      cfg.dt = dt;
      cfg.t_end = 20000.0;
      cfg.burn_in = 20.0;
      cfg.thinning = 0.05;
      cfg.seed = 600 + static_cast<std::uint64_t>(n);
      cfg.restart_on_blowup = true;
      const StationaryRun run =
          stationary_estimates(default_initial_state(p, Model::kAbep), p, cfg, Model::kAbep, obs);
      for (int m = 1; m <= n; ++m) {
        const Estimate& e = run.estimates[static_cast<std::size_t>(m - 1)];
        const double want = one_point_moment(m, p);
        const double z = std::abs(e.mean - want) / e.std_error;
        const std::string line = fmt("N=%d m=%d dt=%g MC %.5f+-%.5f exact %.5f z=%.2f restarts %zu",
                                     n, m, dt, e.mean, e.std_error, want, z, run.restarts);
        if (dt == 1e-3)
          c.require(z < 3.0, line);
        else
          info("[6] " + line);
      }
    }
  }
}

void criterion_two_point() {
  Criterion c{7, "two-point moments", 600};
  const SystemParams p = params(2, 0.05, 1.0, 1.0, 2.0);
  struct Pair {
    int m, n;
  };
  const Pair pairs[] = {{1, 1}, {1, 2}, {2, 2}};
  std::vector<ScalarField> obs;
  for (const Pair q : pairs)
    obs.push_back([q](std::span<const double> x) {
      return exp_energy(x, 0.05, q.m) * exp_energy(x, 0.05, q.n);
    });
  SdeConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 20000.0;
  cfg.burn_in = 20.0;
  cfg.thinning = 0.05;
  cfg.seed = 700;
  cfg.restart_on_blowup = true;
  const StationaryRun run =
      stationary_estimates(default_initial_state(p, Model::kAbep), p, cfg, Model::kAbep, obs);
  for (std::size_t k = 0; k < 3; ++k) {
    const TwoPointMoment t = two_point_moment(pairs[k].m, pairs[k].n, p);
    const Estimate& e = run.estimates[k];
    const double z = std::abs(e.mean - t.assembly) / e.std_error;
    c.require(z < 3.0, fmt("(m,n)=(%d,%d) MC %.5f+-%.5f assembly %.5f z=%.2f", pairs[k].m,
                           pairs[k].n, e.mean, e.std_error, t.assembly, z));
    info(fmt("[7] (m,n)=(%d,%d) closed-form display %.5f differs from assembly by %.3e (%.1f SE)",
             pairs[k].m, pairs[k].n, t.closed_form_display, t.difference(),
             std::abs(e.mean - t.closed_form_display) / e.std_error));
  }
  info(fmt("[7] restarts during the run: %zu", run.restarts));
}

void criterion_reversible() {
  Criterion c{8, "reversible measure", 120};
  {
    const SystemParams p = params(3, 0.05, 1.2, 1.0, 1.0);
    const auto s = reversible_sampler(p, 100000, 80);
    for (int m = 1; m <= 3; ++m) {
      RunningStats st;
      for (const auto& x : s.samples) st.push(exp_energy(x, p.sigma, m));
      const Estimate e = st.estimate();
      const double want = one_point_moment(m, p);
      c.require(std::abs(e.mean - want) < 3 * e.std_error,
                fmt("m=%d sampler %.5f+-%.5f exact %.5f", m, e.mean, e.std_error, want));
    }
    RunningStats two;
    for (const auto& x : s.samples) two.push(exp_energy(x, p.sigma, 1) * exp_energy(x, p.sigma, 3));
    const double want = two_point_moment(1, 3, p).assembly;
    c.require(std::abs(two.mean() - want) < 3 * two.estimate().std_error,
              fmt("(1,3) sampler %.5f+-%.5f exact %.5f", two.mean(), two.estimate().std_error, want));
  }
  {
    // CDF of the normalised density by quadrature, evaluated at sorted draws.
    const SystemParams p = params(1, 0.5, 1.5, 1.0, 1.0);
    auto s = reversible_sampler(p, 100000, 81);
    std::vector<double> xs;
    xs.reserve(s.samples.size());
    for (const auto& x : s.samples) xs.push_back(x[0]);
    std::sort(xs.begin(), xs.end());
    const auto density = [&](double x) { return reversible_density_unnormalized(EnergyConfig{x}, p); };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double mass = ts.integrate(density, 0.0, std::numeric_limits<double>::infinity());
    double cum = 0.0, prev = 0.0, d = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (xs[k] > prev)
        cum += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(density, prev, xs[k], 0);
      prev = xs[k];
      const double f = cum / mass;
      d = std::max({d, std::abs(f - static_cast<double>(k) / n),
                    std::abs(f - static_cast<double>(k + 1) / n)});
    }
    const double crit = 1.628 / std::sqrt(n);
    c.require(d < crit, fmt("N=1 KS distance %.5f < %.5f", d, crit));
  }
  {
    const double sigma = 0.5, t = 4.0;
    const auto s = reversible_sampler(params(1, sigma, 1.0, t, t), 100000, 82);
    const double want = 1.0 - std::exp(-1.0 / (sigma * t));
    const double se = std::sqrt(want * (1 - want) / static_cast<double>(s.proposals));
    c.require(std::abs(s.acceptance_rate() - want) < 3 * se,
              fmt("acceptance %.5f expected %.5f (SE %.5f)", s.acceptance_rate(), want, se));
  }
}

void criterion_orthogonal_mean() {
  Criterion c{9, "orthogonal zero mean", 5};
  const double alpha = 1.3, t = 0.9;
  std::mt19937_64 rng(9);
  std::gamma_distribution<double> gamma(alpha, t);
  std::vector<double> z(100000);
  for (double& v : z) v = gamma(rng);
  for (int k = 1; k <= 5; ++k) {
    RunningStats st;
    for (double v : z) st.push(laguerre_d(v, k, alpha, t));
    const Estimate e = st.estimate();
    c.require(std::abs(e.mean) < 3 * e.std_error, fmt("k=%d mean %.3e SE %.3e", k, e.mean, e.std_error));
  }
}

void explosion_diagnostic() {
  const SystemParams p = params(1, 0.1, 1.0, 1.0, 2.0);
  SdeConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 5000.0;
  cfg.burn_in = 20.0;
  cfg.thinning = 0.05;
  cfg.seed = 1;
  cfg.restart_on_blowup = true;
  const ScalarField obs[] = {[](std::span<const double> x) { return exp_energy(x, 0.1, 1); }};
  const StationaryRun run =
      stationary_estimates(default_initial_state(p, Model::kAbep), p, cfg, Model::kAbep, obs);
  info(fmt("explosive regime N=1 sigma=0.1 T=(1,2): %zu restarts in t=5000, restarted mean %.5f+-%.5f, "
           "formula %.5f",
           run.restarts, run.estimates[0].mean, run.estimates[0].std_error, one_point_moment(1, p)));
}

}  // namespace

int main() {
  try {
    criterion_intertwining();
    criterion_round_trip();
    criterion_generator_duality();
    criterion_semigroup_duality();
    criterion_absorption();
    criterion_one_point();
    criterion_two_point();
    criterion_reversible();
    criterion_orthogonal_mean();
    explosion_diagnostic();
  } catch (const std::exception& e) {
    std::printf("FAIL unexpected exception: %s\n", e.what());
    return 2;
  }
  std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
