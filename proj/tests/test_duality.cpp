#include <cmath>
#include <random>

#include <boost/math/special_functions/factorials.hpp>

#include "abep/duality.hpp"
#include "abep/errors.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace abep;
using abep::testing::random_energies;

namespace {

SystemParams params(int n, double sigma, double alpha, double tl, double tr) {
  SystemParams p;
  p.n_sites = n;
  p.sigma = sigma;
  p.alpha = alpha;
  p.t_left = tl;
  p.t_right = tr;
  return p;
}

// (-T)^k sum_j (-k)_j / ((alpha)_j j!) (zeta/T)^j, summed term by term.
double laguerre_series(double zeta, int k, double alpha, double t) {
  double sum = 0.0;
  for (int j = 0; j <= k; ++j) {
    double falling = 1.0;
    for (int i = 0; i < j; ++i) falling *= k - i;
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    sum += sign * falling / boost::math::rising_factorial(alpha, j) /
           boost::math::factorial<double>(static_cast<unsigned>(j)) * std::pow(zeta / t, j);
  }
  return std::pow(-t, k) * sum;
}

// Every configuration with at most max_particles on sites 0..N+1.
std::vector<ParticleConfig> configs_up_to(int n, int max_particles) {
  std::vector<ParticleConfig> out;
  std::vector<int> xi(static_cast<std::size_t>(n + 2), 0);
  auto rec = [&](auto&& self, std::size_t site, int left) -> void {
    if (site == xi.size()) {
      out.emplace_back(xi);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      xi[site] = c;
      self(self, site + 1, left - c);
    }
    xi[site] = 0;
  };
  rec(rec, 0, max_particles);
  return out;
}

}  // namespace

TEST_CASE("laguerre_d examples") {
  CHECK(laguerre_d(3.7, 0, 1.4, 0.6) == 1.0);
  CHECK(laguerre_d(3.7, 1, 1.4, 0.6) == doctest::Approx(3.7 / 1.4 - 0.6));
  CHECK(laguerre_d(1.4 * 0.6, 1, 1.4, 0.6) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(laguerre_d(2.0, 5, 1.5, 0.7) - laguerre_series(2.0, 5, 1.5, 0.7)) < 1e-12);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 4.0), a(0.3, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double zeta = u(rng), alpha = a(rng), t = a(rng);
    for (int k = 0; k <= 6; ++k) {
      const double want = laguerre_series(zeta, k, alpha, t);
      CHECK(laguerre_d(zeta, k, alpha, t) ==
            doctest::Approx(want).epsilon(1e-10).scale(std::pow(t, k)));
    }
  }
  CHECK_THROWS_AS(laguerre_d(1.0, -1, 1.0, 1.0), ParameterError);
}

TEST_CASE("rising factorial") {
  CHECK(rising_factorial(2.5, 0) == 1.0);
  CHECK(rising_factorial(2.5, 3) == doctest::Approx(2.5 * 3.5 * 4.5));
  CHECK(rising_factorial(0.7, 4) ==
        doctest::Approx(std::tgamma(4.7) / std::tgamma(0.7)).epsilon(1e-13));
}

TEST_CASE("classical and orthogonal functions") {
  const SystemParams p = params(3, 0.4, 1.3, 0.8, 1.7);
  const EnergyConfig z{0.4, 1.1, 2.0};
  CHECK(classical_D(z, ParticleConfig::empty(3), p) == 1.0);
  for (int i = 1; i <= 3; ++i)
    CHECK(classical_D(z, ParticleConfig::from_sites(3, {i}), p) ==
          doctest::Approx(z[static_cast<std::size_t>(i - 1)] / p.alpha));
  ParticleConfig xi = ParticleConfig::from_sites(3, {2, 2});
  xi[0] = 1;
  CHECK(classical_D(z, xi, p) ==
        doctest::Approx(p.t_left * z[1] * z[1] / (p.alpha * (p.alpha + 1))));
  xi[4] = 2;
  CHECK(classical_D(z, xi, p) == doctest::Approx(p.t_left * p.t_right * p.t_right * z[1] *
                                                 z[1] / (p.alpha * (p.alpha + 1))));

  CHECK(orthogonal_D(z, ParticleConfig::empty(3), p, 0.9) == 1.0);
  ParticleConfig left({1, 0, 0, 0, 0});
  CHECK(orthogonal_D(z, left, p, p.t_left) == 0.0);
  CHECK(orthogonal_D(z, left, p, 0.5) == doctest::Approx(p.t_left - 0.5));
  const ParticleConfig mixed({0, 2, 0, 1, 1});
  CHECK(orthogonal_D(z, mixed, p, 0.9) ==
        doctest::Approx(laguerre_d(z[0], 2, p.alpha, 0.9) * laguerre_d(z[2], 1, p.alpha, 0.9) *
                        (p.t_right - 0.9)));
}

TEST_CASE("asymmetric functions are compositions with g") {
  std::mt19937_64 rng(6);
  const SystemParams p = params(3, 0.6, 0.9, 1.1, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    const EnergyConfig x = random_energies(rng, 3);
    const EnergyConfig z = map_g(x, p);
    for (const auto& xi : configs_up_to(3, 2)) {
      CHECK(classical_D_sigma(x, xi, p) == classical_D(z, xi, p));
      CHECK(orthogonal_D_sigma(x, xi, p, 0.7) == orthogonal_D(z, xi, p, 0.7));
    }
    CHECK(classical_D_sigma(x, ParticleConfig::empty(3), p) == 1.0);
    CHECK(orthogonal_D_sigma(x, ParticleConfig::empty(3), p, 0.7) == 1.0);
    for (int i = 1; i <= 3; ++i) {
      double right = 0.0;
      for (int l = i + 1; l <= 3; ++l) right += x[static_cast<std::size_t>(l - 1)];
      const double want = std::exp(-p.sigma * right) *
                          (1.0 - std::exp(-p.sigma * x[static_cast<std::size_t>(i - 1)])) /
                          (p.sigma * p.alpha);
      CHECK(classical_D_sigma(x, ParticleConfig::from_sites(3, {i}), p) ==
            doctest::Approx(want).epsilon(1e-13));
    }
  }

  const EnergyConfig x{0.3, 1.2, 0.8};
  const ParticleConfig xi({1, 2, 0, 1, 0});
  const SystemParams sym = params(3, 0.0, 0.9, 1.1, 0.4);
  for (double sigma : {1e-5, 1e-6}) {
    const SystemParams q = params(3, sigma, 0.9, 1.1, 0.4);
    CHECK(std::abs(classical_D_sigma(x, xi, q) - classical_D(x, xi, sym)) < 10 * sigma);
    CHECK(std::abs(orthogonal_D_sigma(x, xi, q, 0.5) - orthogonal_D(x, xi, sym, 0.5)) <
          10 * sigma);
  }
}

TEST_CASE("orthogonal factors have zero mean under Gamma(alpha, T)") {
  const double alpha = 1.7, t = 0.8;
  std::mt19937_64 rng(99);
  std::gamma_distribution<double> gamma(alpha, t);
  std::vector<double> draws(100000);
  for (double& v : draws) v = gamma(rng);
  for (int k = 1; k <= 5; ++k) {
    double s = 0.0, s2 = 0.0;
    for (double z : draws) {
      const double d = laguerre_d(z, k, alpha, t);
      s += d;
      s2 += d * d;
    }
    const double n = static_cast<double>(draws.size());
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean) < 3 * se);
  }
}

TEST_CASE("sip generator on simple functions") {
  const SystemParams p = params(2, 0.0, 1.0, 1.0, 1.0);
  const auto one = [](const ParticleConfig&) { return 1.0; };
  CHECK(apply_sip_generator(one, ParticleConfig({0, 1, 1, 0}), p) == 0.0);
  // f = xi_0: only the left absorption move changes it.
  const auto left = [](const ParticleConfig& xi) { return static_cast<double>(xi.left()); };
  CHECK(apply_sip_generator(left, ParticleConfig({0, 1, 1, 0}), p) == 1.0);
  CHECK(apply_sip_generator(left, ParticleConfig({0, 3, 0, 0}), params(2, 0.0, 2.0, 1, 1)) ==
        doctest::Approx(6.0));
}

TEST_CASE("generator duality for both models and both functions") {
  std::mt19937_64 rng(13);
  const auto all = configs_up_to(2, 3);
  for (Model model : {Model::kBep, Model::kAbep}) {
    for (DualFunction dual : {DualFunction::kClassical, DualFunction::kOrthogonal}) {
      for (double alpha : {0.6, 1.0, 2.0}) {
        const SystemParams p = params(2, 0.4, alpha, 0.7, 1.3);
        for (int trial = 0; trial < 3; ++trial) {
          const EnergyConfig x = random_energies(rng, 2, 0.1, 2.0);
          for (const auto& xi : all) {
            const auto r = generator_duality(model, dual, x, xi, p, 0.9, 1e-4);
            CHECK(r.residual() < 1e-4);
          }
        }
      }
    }
  }
}

TEST_CASE("semigroup duality: trivial cases") {
  const SystemParams p = params(2, 0.1, 1.0, 0.5, 1.0);
  const EnergyConfig x0{0.4, 0.7};
  DualityMcOptions opts;
  opts.n_runs = 2000;
  opts.seed = 3;
  opts.orthogonal_t = 0.75;
  for (Model model : {Model::kBep, Model::kAbep}) {
    const auto empty = semigroup_duality_check(x0, ParticleConfig::empty(2), 0.5, p, model,
                                               DualFunction::kClassical, opts);
    CHECK(empty.lhs.mean == 1.0);
    CHECK(empty.rhs.mean == 1.0);
    CHECK(empty.z_score == 0.0);

    for (DualFunction dual : {DualFunction::kClassical, DualFunction::kOrthogonal}) {
      const ParticleConfig xi0 = ParticleConfig::from_sites(2, {1, 2});
      const auto at_zero = semigroup_duality_check(x0, xi0, 0.0, p, model, dual, opts);
      const double d = duality_function(model, dual, x0, xi0, p, 0.75);
      CHECK(at_zero.lhs.mean == doctest::Approx(d).epsilon(1e-14));
      CHECK(at_zero.rhs.mean == doctest::Approx(d).epsilon(1e-14));
      CHECK(at_zero.z_score == doctest::Approx(0.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("semigroup duality: small Monte Carlo and thread invariance") {
  const SystemParams p = params(2, 0.1, 1.0, 0.5, 1.0);
  const EnergyConfig x0{0.4, 0.7};
  DualityMcOptions opts;
  opts.n_runs = 20000;
  opts.seed = 8;
  opts.dt = 1e-3;
  const DualityQuery queries[] = {
      {ParticleConfig::from_sites(2, {1}), DualFunction::kClassical},
      {ParticleConfig::from_sites(2, {1, 2}), DualFunction::kOrthogonal},
  };
  const auto r = semigroup_duality_check(x0, queries, 0.3, p, Model::kAbep, opts);
  REQUIRE(r.size() == 2);
  for (const auto& c : r) CHECK(c.z_score < 3.0);

  opts.n_runs = 3000;
  opts.threads = 1;
  const auto a = semigroup_duality_check(x0, queries, 0.3, p, Model::kBep, opts);
  opts.threads = 3;
  const auto b = semigroup_duality_check(x0, queries, 0.3, p, Model::kBep, opts);
  for (std::size_t q = 0; q < 2; ++q) {
    CHECK(a[q].lhs.mean == b[q].lhs.mean);
    CHECK(a[q].rhs.mean == b[q].rhs.mean);
    CHECK(a[q].lhs.std_error == b[q].lhs.std_error);
  }
}
