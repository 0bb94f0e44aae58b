#include "abep/absorption.hpp"

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "abep/errors.hpp"
#include "abep/sip.hpp"

namespace abep {
namespace {

void check_site(int i, int n) {
  if (i < 1 || i > n)
    throw IndexError("site " + std::to_string(i) + " outside 1.." +
                     std::to_string(n));
}

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::MatrixXd solve_checked(Eigen::Index m, const Triplets& entries,
                              const Eigen::MatrixXd& b) {
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw SingularSystem("absorption generator restricted to transient states "
                         "is singular");
  Eigen::MatrixXd h = lu.solve(b);
  if (!h.allFinite() || (a * h - b).lpNorm<Eigen::Infinity>() > 1e-9)
    throw SingularSystem("absorption solve did not converge");
  return h;
}

// Unordered pair states (a, b), a <= b, on 0..N+1.
struct PairSpace {
  int n;
  std::vector<std::pair<int, int>> transient;
  std::vector<int> index;  // (a, b) -> row in `transient`, -1 if absorbed

  explicit PairSpace(int n_sites)
      : n(n_sites),
        index(static_cast<std::size_t>((n_sites + 2) * (n_sites + 2)), -1) {
    for (int a = 0; a <= n + 1; ++a)
      for (int b = a; b <= n + 1; ++b)
        if (!absorbed(a) || !absorbed(b)) {
          index[slot(a, b)] = static_cast<int>(transient.size());
          transient.emplace_back(a, b);
        }
  }
  bool absorbed(int s) const { return s == 0 || s == n + 1; }
  std::size_t slot(int a, int b) const {
    if (a > b) std::swap(a, b);
    return static_cast<std::size_t>(a * (n + 2) + b);
  }
  // Outcome column for a fully absorbed pair: 0 both left, 1 both right,
  // 2 split.
  int outcome(int a, int b) const {
    if (a == 0 && b == 0) return 0;
    if (a == n + 1 && b == n + 1) return 1;
    return 2;
  }
};

}  // namespace

SingleAbsorption single_absorption(int i, const SystemParams& p) {
  p.validate();
  check_site(i, p.n_sites);
  const double n = p.n_sites;
  const double lam = p.reservoir_rate();
  const double a = p.alpha;
  // Linear in the bulk; the boundary rows fix the offset.
  const double right = (lam * i + a - lam) / (lam * n + 2.0 * a - lam);
  return {1.0 - right, right};
}

SingleAbsorption single_absorption_solve(int i, const SystemParams& p) {
  p.validate();
  check_site(i, p.n_sites);
  const int n = p.n_sites;
  Triplets a;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 1);  // P(absorbed right)
  for (int s = 1; s <= n; ++s) {
    const ParticleConfig xi = ParticleConfig::from_sites(n, {s});
    for (const SipMove& m : sip_moves(xi, p)) {
      a.emplace_back(s - 1, s - 1, -m.rate);
      if (m.to == n + 1)
        b(s - 1, 0) -= m.rate;
      else if (m.to != 0)
        a.emplace_back(s - 1, m.to - 1, m.rate);
    }
  }
  const Eigen::MatrixXd h = solve_checked(n, a, b);
  const double right = h(i - 1, 0);
  return {1.0 - right, right};
}

std::vector<std::vector<AbsorptionResult>> two_particle_table(
    const SystemParams& p) {
  p.validate();
  const int n = p.n_sites;
  const PairSpace space(n);
  const auto m = static_cast<Eigen::Index>(space.transient.size());
  Triplets a;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, 3);

  for (Eigen::Index row = 0; row < m; ++row) {
    const auto [s, t] = space.transient[static_cast<std::size_t>(row)];
    const ParticleConfig xi = ParticleConfig::from_sites(n, {s, t});
    for (const SipMove& mv : sip_moves(xi, p)) {
      // The moving particle is the one sitting on mv.from.
      const int other = (s == mv.from) ? t : s;
      const int u = mv.to;
      a.emplace_back(row, row, -mv.rate);
      if (space.absorbed(u) && space.absorbed(other)) {
        b(row, space.outcome(std::min(u, other), std::max(u, other))) -= mv.rate;
      } else {
        a.emplace_back(row, space.index[space.slot(u, other)], mv.rate);
      }
    }
  }
  const Eigen::MatrixXd h = solve_checked(m, a, b);

  std::vector<std::vector<AbsorptionResult>> table(
      static_cast<std::size_t>(n), std::vector<AbsorptionResult>(static_cast<std::size_t>(n)));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      const int row = space.index[space.slot(i, j)];
      table[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = {
          h(row, 0), h(row, 1), h(row, 2)};
    }
  return table;
}

AbsorptionResult two_particle_solve(int i, int j, const SystemParams& p) {
  p.validate();
  check_site(i, p.n_sites);
  check_site(j, p.n_sites);
  return two_particle_table(p)[static_cast<std::size_t>(i - 1)]
                              [static_cast<std::size_t>(j - 1)];
}

AbsorptionResult two_particle_closed_form(int i, int j, const SystemParams& p) {
  p.validate();
  check_site(i, p.n_sites);
  check_site(j, p.n_sites);
  if (p.coupling != ReservoirCoupling::kAlpha)
    throw ParameterError("two-particle closed forms assume alpha-rate absorption");
  if (i > j) std::swap(i, j);
  const double a = p.alpha;
  const double m = p.n_sites + 1.0;
  const double den = m * (a * m + 1.0);
  const double diag = i == j ? 1.0 : 0.0;
  AbsorptionResult r;
  r.p_both_left = (m - j) * (a * (m - i) + 1.0) / den - 0.5 * diag / den;
  r.p_both_right = i * (1.0 + a * j) / den - 0.5 * diag / den;
  r.p_split = ((a * m - 1.0) * i + (1.0 + a * m) * j - 2.0 * a * i * j) / den +
              diag / den;
  return r;
}

}  // namespace abep
