#include "abep_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "CLI11.hpp"
#include "abep/absorption.hpp"
#include "abep/duality.hpp"
#include "abep/errors.hpp"
#include "abep/generators.hpp"
#include "abep/moments.hpp"
#include "abep/sde.hpp"
#include "abep/sip.hpp"
#include "abep/stats.hpp"
#include "abep_cli/config_file.hpp"
#include "abep_cli/csv.hpp"

namespace abep::cli {
namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Common {
  int n = 2;
  double sigma = 0.1;
  double alpha = 1.0;
  double tl = 1.0;
  double tr = 1.0;
  std::string coupling = "alpha";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string config;
  std::string out;
  bool no_header = false;
  bool check = false;

  SystemParams params() const {
    SystemParams p;
    p.n_sites = n;
    p.sigma = sigma;
    p.alpha = alpha;
    p.t_left = tl;
    p.t_right = tr;
    p.coupling = coupling == "unit" ? ReservoirCoupling::kUnit : ReservoirCoupling::kAlpha;
    p.validate();
    return p;
  }
  unsigned workers() const { return threads == 0 ? default_threads() : threads; }
};

struct SdeOptions {
  std::string model = "abep";
  double dt = 1e-3;
  double t_end = 10.0;
  double burn_in = 0.0;
  double thinning = 0.1;
  double blowup_cap = 1e6;
  bool restart = false;
  std::vector<double> x0;
};

struct DualityOptions {
  std::string dual = "classical";
  double t = 0.5;
  std::size_t runs = 100000;
  std::vector<int> xi{1};
  double orth_t = kUnset;
  double z_max = 3.0;
  double max_blowup_fraction = 1e-3;
};

struct IntertwiningOptions {
  std::size_t states = 100;
  double fd_step = 1e-4;
  double tol = 1e-4;
  double lo = 0.0;
  double hi = 2.0;
};

struct AbsorptionOptions {
  int i = 0;
  int j = 0;
  std::size_t runs = 0;
};

struct MomentOptions {
  bool two_point = false;
  bool no_restart = false;
};

struct ReversibleOptions {
  std::size_t samples = 100000;
  double t = kUnset;
};

struct State {
  Common common;
  SdeOptions sde;
  // Long-run defaults for the stationary estimator.
  SdeOptions moment_sde{"abep", 1e-3, 2000.0, 20.0, 0.05, 1e6, false, {}};
  DualityOptions duality;
  IntertwiningOptions inter;
  AbsorptionOptions absorption;
  MomentOptions moments;
  ReversibleOptions reversible;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--n", c.n, "number of bulk sites N")->capture_default_str();
  app->add_option("--sigma", c.sigma, "asymmetry sigma")->capture_default_str();
  app->add_option("--alpha", c.alpha, "interaction alpha")->capture_default_str();
  app->add_option("--tl", c.tl, "left reservoir temperature")->capture_default_str();
  app->add_option("--tr", c.tr, "right reservoir temperature")->capture_default_str();
  app->add_option("--coupling", c.coupling, "reservoir coupling: alpha or unit")
      ->check(CLI::IsMember({"alpha", "unit"}))
      ->capture_default_str();
  app->add_option("--seed", c.seed, "global seed")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (0: ABEP_THREADS or all cores)");
  app->add_option("--config", c.config, "flat key=value file; command-line flags win");
  app->add_option("--out", c.out, "write CSV to this path instead of stdout");
  app->add_flag("--no-header", c.no_header, "omit the timestamp comment line");
  app->add_flag("--check", c.check, "exit nonzero when a verification fails");
}

void add_sde(CLI::App* app, SdeOptions& s, bool trajectory) {
  app->add_option("--model", s.model, "bep or abep")
      ->check(CLI::IsMember({"bep", "abep"}))
      ->capture_default_str();
  app->add_option("--dt", s.dt, "Euler-Maruyama step")->capture_default_str();
  app->add_option("--blowup-cap", s.blowup_cap, "state cap signalling blowup")->capture_default_str();
  app->add_option("--x0", s.x0, "initial energies, comma separated")->delimiter(',');
  if (!trajectory) return;
  app->add_option("--t-end", s.t_end, "time horizon")->capture_default_str();
  app->add_option("--burn-in", s.burn_in, "burn-in time")->capture_default_str();
  app->add_option("--thinning", s.thinning, "sampling interval")->capture_default_str();
  app->add_flag("--restart-on-blowup", s.restart, "restart from x0 after a blowup");
}

std::string xi_label(const std::vector<int>& sites) {
  std::string s;
  for (int v : sites) s += (s.empty() ? "" : "+") + std::to_string(v);
  return s.empty() ? "0" : s;
}

ParticleConfig particles_at(int n, const std::vector<int>& sites) {
  ParticleConfig xi = ParticleConfig::empty(n);
  for (int s : sites) {
    if (s < 0 || s > n + 1)
      throw ParameterError("particle site " + std::to_string(s) + " outside 0.." +
                           std::to_string(n + 1));
    ++xi[s];
  }
  return xi;
}

Model parse_model(const std::string& m) { return m == "bep" ? Model::kBep : Model::kAbep; }

EnergyConfig initial_state(const SdeOptions& s, const SystemParams& p, Model model) {
  if (s.x0.empty()) return default_initial_state(p, model);
  validate_energies(s.x0, p.n_sites);
  return s.x0;
}

double exp_energy(std::span<const double> x, double sigma, int m) {
  double e = 0.0;
  for (std::size_t k = static_cast<std::size_t>(m - 1); k < x.size(); ++k) e += x[k];
  return std::exp(-sigma * e);
}

// Applies config entries to options the command line left unset.
void apply_config(CLI::App* sub, const std::string& path) {
  for (const ConfigEntry& e : read_config_file(path)) {
    const std::string where = path + ":" + std::to_string(e.line);
    if (e.key == "config") throw ConfigError(where + ": 'config' cannot be nested");
    CLI::Option* opt = sub->get_option_no_throw("--" + e.key);
    if (opt == nullptr)
      throw ConfigError(where + ": unknown field '" + e.key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    try {
      opt->add_result(e.value);
      opt->run_callback();
    } catch (const CLI::Error& err) {
      throw ConfigError(where + ": field '" + e.key + "': invalid value '" + e.value + "' (" +
                        err.what() + ")");
    }
  }
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

int cmd_simulate(const State& st, CsvWriter& csv) {
  const SystemParams p = st.common.params();
  const Model model = parse_model(st.sde.model);
  SdeConfig cfg;
  cfg.dt = st.sde.dt;
  cfg.t_end = st.sde.t_end;
  cfg.burn_in = st.sde.burn_in;
  cfg.thinning = st.sde.thinning;
  cfg.seed = st.common.seed;
  cfg.blowup_cap = st.sde.blowup_cap;
  cfg.restart_on_blowup = st.sde.restart;
  const auto samples = simulate_trajectory(initial_state(st.sde, p, model), p, cfg, model);

  std::vector<Cell> head{"time"};
  for (int i = 1; i <= p.n_sites; ++i) head.emplace_back("x" + std::to_string(i));
  csv.row(head);
  bool positive = true;
  for (const auto& s : samples) {
    std::vector<Cell> row{s.time};
    for (double v : s.state) {
      row.emplace_back(v);
      positive = positive && v >= 0.0;
    }
    csv.row(row);
  }
  return positive ? kOk : kCheckFailed;
}

int cmd_verify_duality(const State& st, CsvWriter& csv, std::ostream& err) {
  const SystemParams p = st.common.params();
  const Model model = parse_model(st.sde.model);
  const DualFunction dual =
      st.duality.dual == "orthogonal" ? DualFunction::kOrthogonal : DualFunction::kClassical;
  DualityMcOptions opts;
  opts.n_runs = st.duality.runs;
  opts.dt = st.sde.dt;
  opts.seed = st.common.seed;
  opts.threads = st.common.workers();
  opts.blowup_cap = st.sde.blowup_cap;
  opts.discard_blowups = true;
  opts.orthogonal_t = std::isnan(st.duality.orth_t) ? 0.5 * (p.t_left + p.t_right)
                                                    : st.duality.orth_t;
  if (dual == DualFunction::kOrthogonal && !(opts.orthogonal_t > 0.0))
    throw ParameterError("orthogonal duality needs a positive --orth-t");
  const ParticleConfig xi0 = particles_at(p.n_sites, st.duality.xi);
  const DualityCheck r = semigroup_duality_check(initial_state(st.sde, p, model), xi0,
                                                 st.duality.t, p, model, dual, opts);
  csv.row({"model", "dual", "xi", "t", "dt", "runs", "lhs", "lhs_se", "rhs", "rhs_se", "z_score",
           "blowups"});
  csv.row({st.sde.model, st.duality.dual, xi_label(st.duality.xi), st.duality.t, st.sde.dt,
           static_cast<unsigned long long>(opts.n_runs), r.lhs.mean, r.lhs.std_error,
           r.rhs.mean, r.rhs.std_error, r.z_score, static_cast<unsigned long long>(r.blowups)});
  int code = kOk;
  if (r.blowups > 0) {
    const double f = static_cast<double>(r.blowups) / static_cast<double>(opts.n_runs);
    err << "warning: " << r.blowups << " SDE path(s) exceeded the cap and were dropped from lhs\n";
    if (f > st.duality.max_blowup_fraction) {
      err << "duality check: blowup fraction " << f << " > " << st.duality.max_blowup_fraction
          << "\n";
      code = kCheckFailed;
    }
  }
  if (r.z_score >= st.duality.z_max) {
    err << "duality check: z = " << r.z_score << " >= " << st.duality.z_max << "\n";
    code = kCheckFailed;
  }
  return code;
}

// Monomials of degree <= 3 in N variables, labelled like "z1*z2".
std::vector<std::pair<std::string, ScalarField>> test_functions(int n) {
  std::vector<std::pair<std::string, ScalarField>> out;
  out.emplace_back("1", [](std::span<const double>) { return 1.0; });
  auto name = [](std::initializer_list<int> idx) {
    std::string s;
    for (int k : idx) s += (s.empty() ? "z" : "*z") + std::to_string(k + 1);
    return s;
  };
  for (int a = 0; a < n; ++a) {
    out.emplace_back(name({a}), [a](std::span<const double> z) { return z[a]; });
    for (int b = a; b < n; ++b) {
      out.emplace_back(name({a, b}), [a, b](std::span<const double> z) { return z[a] * z[b]; });
      for (int c = b; c < n; ++c)
        out.emplace_back(name({a, b, c}), [a, b, c](std::span<const double> z) {
          return z[a] * z[b] * z[c];
        });
    }
  }
  return out;
}

int cmd_verify_intertwining(const State& st, CsvWriter& csv) {
  const SystemParams p = st.common.params();
  p.validate_asymmetric();
  const auto& o = st.inter;
  if (!(o.hi > o.lo) || o.lo < 0.0) throw ParameterError("need 0 <= lo < hi");
  Engine rng = make_engine(st.common.seed, "intertwining", 0);
  std::uniform_real_distribution<double> u(o.lo, o.hi);
  std::vector<EnergyConfig> states(o.states, EnergyConfig(static_cast<std::size_t>(p.n_sites)));
  for (auto& x : states)
    for (double& v : x) v = u(rng);

  csv.row({"function", "states", "fd_step", "max_residual", "mean_residual"});
  bool ok = true;
  for (const auto& [label, f] : test_functions(p.n_sites)) {
    double worst = 0.0, total = 0.0;
    for (const auto& x : states) {
      const double r = intertwining_residual(x, p, f, o.fd_step);
      worst = std::max(worst, r);
      total += r;
    }
    ok = ok && worst < o.tol;
    csv.row({label, static_cast<unsigned long long>(o.states), o.fd_step, worst,
             states.empty() ? 0.0 : total / static_cast<double>(states.size())});
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_absorption(const State& st, CsvWriter& csv) {
  const SystemParams p = st.common.params();
  const auto& o = st.absorption;
  if ((o.i == 0) != (o.j == 0)) throw ParameterError("give both --i and --j, or neither");
  std::vector<std::pair<int, int>> pairs;
  if (o.i != 0) {
    pairs.emplace_back(std::min(o.i, o.j), std::max(o.i, o.j));
  } else {
    for (int i = 1; i <= p.n_sites; ++i)
      for (int j = i; j <= p.n_sites; ++j) pairs.emplace_back(i, j);
  }
  for (const auto& [i, j] : pairs)
    if (i < 1 || j > p.n_sites) throw IndexError("sites must lie in 1..N");

  const bool closed = p.coupling == ReservoirCoupling::kAlpha;
  const auto table = two_particle_table(p);
  csv.row({"n", "alpha", "i", "j", "solve_both_left", "solve_both_right", "solve_split",
           "closed_both_left", "closed_both_right", "closed_split", "max_abs_diff",
           "mc_both_left", "mc_both_right", "mc_split", "mc_max_z"});
  bool ok = true;
  std::size_t index = 0;
  for (const auto& [i, j] : pairs) {
    const AbsorptionResult& sv =
        table[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
    ok = ok && std::abs(sv.sum() - 1.0) < 1e-12;
    std::optional<double> cl, cr, cs, diff;
    if (closed) {
      const AbsorptionResult cf = two_particle_closed_form(i, j, p);
      cl = cf.p_both_left;
      cr = cf.p_both_right;
      cs = cf.p_split;
      diff = std::max({std::abs(sv.p_both_left - cf.p_both_left),
                       std::abs(sv.p_both_right - cf.p_both_right),
                       std::abs(sv.p_split - cf.p_split)});
      ok = ok && *diff < 1e-10;
    }
    std::optional<double> ml, mr, ms, mz;
    if (o.runs > 0) {
      const auto est = mc_absorption(ParticleConfig::from_sites(p.n_sites, {i, j}), p, o.runs,
                                     stream_seed(st.common.seed, "absorption", index),
                                     st.common.workers());
      ml = est.left_count(2).probability;
      ms = est.left_count(1).probability;
      mr = est.left_count(0).probability;
      const double exact[3] = {sv.p_both_right, sv.p_split, sv.p_both_left};
      double z = 0.0;
      for (int k = 0; k <= 2; ++k) {
        const auto& oc = est.left_count(k);
        const double gap = std::abs(oc.probability - exact[k]);
        z = std::max(z, oc.std_error > 0.0 ? gap / oc.std_error : (gap > 0.0 ? INFINITY : 0.0));
      }
      mz = z;
      ok = ok && z < 3.0;
    }
    csv.row({p.n_sites, p.alpha, i, j, sv.p_both_left, sv.p_both_right, sv.p_split, cl, cr, cs,
             diff, ml, mr, ms, mz});
    ++index;
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_moments(const State& st, CsvWriter& csv, std::ostream& err) {
  const SystemParams p = st.common.params();
  const SdeOptions& sde = st.moment_sde;
  const int n = p.n_sites;
  const bool mc = sde.t_end > 0.0;
  struct Row {
    int m, k;
  };
  std::vector<Row> rows;
  for (int m = 1; m <= n; ++m) {
    if (!st.moments.two_point) {
      rows.push_back({m, m});
      continue;
    }
    for (int k = m; k <= n; ++k) rows.push_back({m, k});
  }

  std::vector<Estimate> est(rows.size());
  std::size_t restarts = 0;
  if (mc) {
    p.validate_asymmetric();
    std::vector<ScalarField> obs;
    const double s = p.sigma;
    for (const Row r : rows) {
      if (st.moments.two_point)
        obs.push_back([r, s](std::span<const double> x) {
          return exp_energy(x, s, r.m) * exp_energy(x, s, r.k);
        });
      else
        obs.push_back([r, s](std::span<const double> x) { return exp_energy(x, s, r.m); });
    }
    SdeConfig cfg;
    cfg.dt = sde.dt;
    cfg.t_end = sde.t_end;
    cfg.burn_in = sde.burn_in;
    cfg.thinning = sde.thinning;
    cfg.seed = st.common.seed;
    cfg.blowup_cap = sde.blowup_cap;
    cfg.restart_on_blowup = !st.moments.no_restart;
    const StationaryRun run = stationary_estimates(initial_state(sde, p, Model::kAbep), p, cfg,
                                                   Model::kAbep, obs);
    est = run.estimates;
    restarts = run.restarts;
    if (restarts > 0)
      err << "warning: " << restarts
          << " restart(s) after blowup; Monte Carlo columns describe the restarted process\n";
  }

  bool ok = true;
  auto mc_cells = [&](std::size_t k, double exact) -> std::vector<Cell> {
    if (!mc) return {std::optional<double>(), std::optional<double>(), std::string()};
    const double gap = std::abs(est[k].mean - exact);
    ok = ok && gap < 3.0 * est[k].std_error + 1e-15;
    return {est[k].mean, est[k].std_error, static_cast<unsigned long long>(restarts)};
  };

  if (!st.moments.two_point) {
    csv.row({"m", "closed_form", "telescoping", "absorption_route", "mc_mean", "mc_se",
             "mc_restarts"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const int m = rows[k].m;
      const double absorption = one_point_absorption_route(m, p);
      std::vector<Cell> row{m};
      if (p.coupling == ReservoirCoupling::kAlpha) {
        const double cf = one_point_moment(m, p), tel = one_point_telescoping(m, p);
        ok = ok && std::abs(cf - tel) < 1e-12 && std::abs(cf - absorption) < 1e-12;
        row.insert(row.end(), {cf, tel});
      } else {
        row.insert(row.end(), {std::optional<double>(), std::optional<double>()});
      }
      row.emplace_back(absorption);
      for (auto& c : mc_cells(k, absorption)) row.push_back(std::move(c));
      csv.row(row);
    }
  } else {
    csv.row({"m", "n", "assembly", "closed_form_display", "difference", "mc_mean", "mc_se",
             "mc_restarts"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const TwoPointMoment t = two_point_moment(rows[k].m, rows[k].k, p);
      std::vector<Cell> row{rows[k].m, rows[k].k, t.assembly, t.closed_form_display,
                            t.difference()};
      for (auto& c : mc_cells(k, t.assembly)) row.push_back(std::move(c));
      csv.row(row);
    }
  }
  return ok ? kOk : kCheckFailed;
}

// Kolmogorov-Smirnov distance of N=1 draws against the normalised density.
double ks_distance(std::vector<double> xs, const SystemParams& p) {
  std::sort(xs.begin(), xs.end());
  const auto density = [&](double x) { return reversible_density_unnormalized(EnergyConfig{x}, p); };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double mass = ts.integrate(density, 0.0, std::numeric_limits<double>::infinity());
  const double n = static_cast<double>(xs.size());
  double cum = 0.0, prev = 0.0, d = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] > prev)
      cum += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(density, prev, xs[k], 0);
    prev = xs[k];
    d = std::max({d, std::abs(cum / mass - static_cast<double>(k) / n),
                  std::abs(cum / mass - static_cast<double>(k + 1) / n)});
  }
  return d;
}

// E[exp(-sigma E_m(x))] for the sampler's law: iid Gamma(alpha, T) z
// conditioned on sigma * sum(z) < 1.
double conditioned_one_point(int m, const SystemParams& p) {
  const double shape = p.n_sites * p.alpha;
  const double c = 1.0 / (p.sigma * p.t_left);
  const double ratio = boost::math::gamma_p(shape + 1.0, c) / boost::math::gamma_p(shape, c);
  return 1.0 - p.sigma * p.alpha * p.t_left * (p.n_sites - m + 1.0) * ratio;
}

int cmd_reversible(const State& st, CsvWriter& csv) {
  SystemParams p = st.common.params();
  if (!std::isnan(st.reversible.t)) p.t_left = p.t_right = st.reversible.t;
  const auto s = reversible_sampler(p, st.reversible.samples, st.common.seed);
  const double t = p.t_left;

  csv.row({"quantity", "value", "expected", "std_error", "z_score"});
  bool ok = true;
  auto emit = [&](const std::string& q, double value, double expected, double se) {
    const double z = se > 0.0 ? std::abs(value - expected) / se : 0.0;
    ok = ok && z < 3.0;
    csv.row({q, value, expected, se, z});
  };
  const double accept = boost::math::gamma_p(p.n_sites * p.alpha, 1.0 / (p.sigma * t));
  emit("acceptance_rate", s.acceptance_rate(), accept,
       std::sqrt(accept * (1.0 - accept) / static_cast<double>(s.proposals)));
  for (int m = 1; m <= p.n_sites; ++m) {
    RunningStats rs;
    for (const auto& x : s.samples) rs.push(exp_energy(x, p.sigma, m));
    const Estimate e = rs.estimate();
    emit("one_point_m" + std::to_string(m), e.mean, conditioned_one_point(m, p), e.std_error);
  }
  if (p.n_sites == 1 && !s.samples.empty()) {
    std::vector<double> xs;
    for (const auto& x : s.samples) xs.push_back(x[0]);
    const double d = ks_distance(xs, p);
    const double crit = 1.628 / std::sqrt(static_cast<double>(xs.size()));
    ok = ok && d < crit;
    csv.row({"ks_distance", d, crit, std::optional<double>(), std::optional<double>()});
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  State st;
  CLI::App app{"Simulation and verification toolkit for the open ABEP, BEP and SIP", "abep"};
  app.require_subcommand(1, 1);

  CLI::App* simulate = app.add_subcommand("simulate", "Euler-Maruyama trajectory of BEP/ABEP");
  add_common(simulate, st.common);
  add_sde(simulate, st.sde, true);

  CLI::App* duality = app.add_subcommand("verify-duality", "two-sided Monte Carlo duality check");
  add_common(duality, st.common);
  add_sde(duality, st.sde, false);
  duality->add_option("--dual", st.duality.dual, "classical or orthogonal")
      ->check(CLI::IsMember({"classical", "orthogonal"}))
      ->capture_default_str();
  duality->add_option("--t", st.duality.t, "time horizon")->capture_default_str();
  duality->add_option("--runs", st.duality.runs, "paired runs per side")->capture_default_str();
  duality->add_option("--xi", st.duality.xi, "dual particle sites, comma separated")
      ->delimiter(',');
  duality->add_option("--orth-t", st.duality.orth_t,
                      "T of the orthogonal function (default (tl+tr)/2)");
  duality->add_option("--z-max", st.duality.z_max, "largest accepted z-score")->capture_default_str();
  duality->add_option("--max-blowup-fraction", st.duality.max_blowup_fraction,
                      "largest accepted fraction of dropped SDE paths")
      ->capture_default_str();

  CLI::App* inter = app.add_subcommand("verify-intertwining", "ABEP/BEP intertwining residuals");
  add_common(inter, st.common);
  inter->add_option("--states", st.inter.states, "random states")->capture_default_str();
  inter->add_option("--fd-step", st.inter.fd_step, "finite-difference step")->capture_default_str();
  inter->add_option("--tol", st.inter.tol, "largest accepted residual")->capture_default_str();
  inter->add_option("--lo", st.inter.lo, "lower bound of state components")->capture_default_str();
  inter->add_option("--hi", st.inter.hi, "upper bound of state components")->capture_default_str();

  CLI::App* absorb = app.add_subcommand("absorption", "two-particle absorption probabilities");
  add_common(absorb, st.common);
  absorb->add_option("--i", st.absorption.i, "first particle site (omit for all pairs)");
  absorb->add_option("--j", st.absorption.j, "second particle site");
  absorb->add_option("--runs", st.absorption.runs, "Gillespie runs for the MC columns (0: none)")
      ->capture_default_str();

  CLI::App* moments = app.add_subcommand("moments", "stationary sigma-exponential moments");
  add_common(moments, st.common);
  add_sde(moments, st.moment_sde, true);
  moments->remove_option(moments->get_option("--model"));  // always ABEP
  moments->add_flag("--two-point", st.moments.two_point, "emit two-point rows instead");
  moments->add_flag("--no-restart", st.moments.no_restart,
                    "fail on ABEP blowup instead of restarting");

  CLI::App* rev = app.add_subcommand("reversible-check", "equal-temperature reversible measure");
  add_common(rev, st.common);
  rev->add_option("--samples", st.reversible.samples, "accepted samples")->capture_default_str();
  rev->add_option("--t", st.reversible.t, "common temperature (default: --tl, needs tl == tr)");


  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }
  CLI::App* sub = app.get_subcommands().front();

  try {
    if (!st.common.config.empty()) apply_config(sub, st.common.config);

    std::ofstream file;
    std::ostream* os = &out;
    if (!st.common.out.empty()) {
      file.open(st.common.out);
      if (!file) throw ConfigError("cannot open output file '" + st.common.out + "'");
      os = &file;
    }
    if (!st.common.no_header) *os << "# abep " << sub->get_name() << " " << timestamp() << "\n";
    CsvWriter csv(*os);

    int code = kOk;
    if (sub == simulate)
      code = cmd_simulate(st, csv);
    else if (sub == duality)
      code = cmd_verify_duality(st, csv, err);
    else if (sub == inter)
      code = cmd_verify_intertwining(st, csv);
    else if (sub == absorb)
      code = cmd_absorption(st, csv);
    else if (sub == moments)
      code = cmd_moments(st, csv, err);
    else
      code = cmd_reversible(st, csv);
    os->flush();
    if (code != kOk && st.common.check) {
      err << "check failed\n";
      return kCheckFailed;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IndexError& e) {
    err << "index error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace abep::cli
