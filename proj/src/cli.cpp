#include "dsod/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsod/common.hpp"
#include "dsod/field.hpp"
#include "dsod/green.hpp"
#include "dsod/io.hpp"
#include "dsod/kernel.hpp"
#include "dsod/limit.hpp"
#include "dsod/parallel.hpp"
#include "dsod/rng.hpp"
#include "dsod/sandpile.hpp"
#include "dsod/stats.hpp"
#include "dsod/torus.hpp"

namespace dsod {

namespace {

std::atomic<bool> g_interrupted{false};

void sigint_handler(int) { g_interrupted.store(true); }

void check_interrupt() {
  if (g_interrupted.load(std::memory_order_relaxed))
    throw Interrupted("interrupted");
}

// One option record shared by all subcommands; only the parsed one runs.
struct Options {
  int d = 1;
  int n = 8;
  std::vector<long> n_list;
  std::string dist = "gaussian";
  double radius = 3.0;
  std::uint64_t seed = 0;
  long trials = 100;
  double tol = 1e-10;
  long max_sweeps = 10'000'000;
  std::string u_spec;
  double eps = 1.5;
  double kappa = 0.0;
  long cutoff = 0;
  long shells = 1;
  std::string form = "auto";
  double theta_min = 0.0;
  double theta_max = 0.5;
  long grid_steps = 11;
  int max_moment = 4;
  int d_max = 3;
  int n_max = 64;
  std::string mode;
  std::string input;
  std::string out;
  int workers = 0;  // <= 0 means all available cores
};

// Distinct substream base per lattice size so different n draw independently.
std::uint64_t mix_seed(std::uint64_t seed, long n) {
  SplitMix64 sm(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n)));
  return sm.next();
}

WeightDistribution make_dist(const Options& o) {
  return WeightDistribution::parse(o.dist, o.radius);
}

Table new_table(const std::string& command) {
  Table t;
  t.add_meta("tool", std::string(kVersion));
  t.add_meta("command", command);
  return t;
}

void add_dist_meta(Table& t, const Options& o, const WeightDistribution& dist) {
  t.add_meta("dist", dist.name());
  if (dist.kind == WeightKind::truncated_gaussian) {
    t.add_meta("radius", o.radius);
    t.add_meta("dist_variance", dist.v_R);
  }
}

void emit_table(const Options& o, const Table& t) {
  if (o.out.empty()) {
    write_table(std::cout, t);
    return;
  }
  const auto path = resolve_output_path(o.out);
  std::ofstream os(path);
  if (!os) throw UsageError("cannot open for writing: " + path.string());
  write_table(os, t);
}

std::string fmt_seed(std::uint64_t seed) { return std::to_string(seed); }

// ---------------------------------------------------------------- stabilize

int run_stabilize(const Options& o, bool seed_given) {
  Table t = new_table("stabilize");
  GridFunction sigma;
  if (!o.input.empty()) {
    sigma = read_snapshot(o.input);
    t.add_meta("input", o.input);
  } else {
    if (!seed_given)
      throw UsageError("stabilize needs --seed (or --input with a weight "
                       "snapshot)");
    const TorusLattice lat = TorusLattice::make(o.d, o.n);
    GaussianSource gauss(trial_stream(o.seed, 0));
    sigma = draw_weights(lat, make_dist(o), gauss);
    add_dist_meta(t, o, make_dist(o));
    t.add_meta("seed", fmt_seed(o.seed));
  }
  const TorusLattice lat = sigma.lat;
  t.add_meta("d", static_cast<long long>(lat.d));
  t.add_meta("n", static_cast<long long>(lat.n));
  t.add_meta("tol", o.tol);
  t.add_meta("max_sweeps", static_cast<long long>(o.max_sweeps));

  GridFunction s = init_configuration(sigma);
  t.columns = {"site", "final_mass", "odometer_raw", "odometer_shifted"};
  try {
    StabilizeResult res =
        stabilize(std::move(s), o.tol, o.max_sweeps, nullptr, &g_interrupted);
    t.add_meta("converged", static_cast<long long>(1));
    t.add_meta("sweeps", static_cast<long long>(res.odometer.sweeps));
    t.add_meta("residual", res.odometer.residual);
    for (std::size_t x = 0; x < lat.size; ++x)
      t.rows.push_back({std::to_string(x), format_double(res.final_config.v[x]),
                        format_double(res.odometer.raw.v[x]),
                        format_double(res.odometer.shifted.v[x])});
    emit_table(o, t);
    return 0;
  } catch (const NonConvergence& e) {
    t.add_meta("converged", static_cast<long long>(0));
    t.add_meta("sweeps", static_cast<long long>(e.sweeps));
    t.add_meta("residual", e.residual);
    emit_table(o, t);
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Interrupted&) {
    t.truncated = true;
    emit_table(o, t);
    return 130;
  }
}

// --------------------------------------------------------- odometer-compare

int run_odometer_compare(const Options& o) {
  const TorusLattice lat = TorusLattice::make(o.d, o.n);
  const WeightDistribution dist = make_dist(o);
  Table t = new_table("odometer-compare");
  t.add_meta("d", static_cast<long long>(lat.d));
  t.add_meta("n", static_cast<long long>(lat.n));
  add_dist_meta(t, o, dist);
  t.add_meta("seed", fmt_seed(o.seed));
  t.add_meta("trials", static_cast<long long>(o.trials));
  t.add_meta("tol", o.tol);
  t.add_meta("max_sweeps", static_cast<long long>(o.max_sweeps));
  t.columns = {"trial", "sup_diff", "sweeps", "residual"};

  std::vector<double> sup(static_cast<std::size_t>(o.trials));
  std::vector<long> sweeps(static_cast<std::size_t>(o.trials));
  std::vector<double> resid(static_cast<std::size_t>(o.trials));
  try {
    parallel_for(o.trials, o.workers, [&](long i) {
      check_interrupt();
      GaussianSource gauss(trial_stream(o.seed, static_cast<std::uint64_t>(i)));
      const GridFunction sigma = draw_weights(lat, dist, gauss);
      const GridFunction s = init_configuration(sigma);
      const GridFunction spectral = spectral_odometer(s);
      const StabilizeResult res =
          stabilize(s, o.tol, o.max_sweeps, nullptr, &g_interrupted);
      double worst = 0.0;
      for (std::size_t x = 0; x < lat.size; ++x)
        worst = std::max(worst,
                         std::abs(res.odometer.shifted.v[x] - spectral.v[x]));
      sup[static_cast<std::size_t>(i)] = worst;
      sweeps[static_cast<std::size_t>(i)] = res.odometer.sweeps;
      resid[static_cast<std::size_t>(i)] = res.odometer.residual;
    });
  } catch (const Interrupted&) {
    t.truncated = true;
    emit_table(o, t);
    return 130;
  }
  double worst = 0.0;
  for (long i = 0; i < o.trials; ++i) {
    worst = std::max(worst, sup[static_cast<std::size_t>(i)]);
    t.rows.push_back({std::to_string(i),
                      format_double(sup[static_cast<std::size_t>(i)]),
                      std::to_string(sweeps[static_cast<std::size_t>(i)]),
                      format_double(resid[static_cast<std::size_t>(i)])});
  }
  t.meta.emplace_back("max_sup_diff", format_double(worst));
  emit_table(o, t);
  return 0;
}

// ------------------------------------------------------------- sample-field

int run_sample_field(const Options& o) {
  if (o.out.empty())
    throw UsageError("sample-field writes a binary snapshot; --out is required");
  const TorusLattice lat = TorusLattice::make(o.d, o.n);
  GridFunction f;
  Table t = new_table("sample-field");
  t.add_meta("mode", o.mode);
  t.add_meta("d", static_cast<long long>(lat.d));
  t.add_meta("n", static_cast<long long>(lat.n));
  if (o.mode == "chi") {
    f = sample_chi(lat, o.seed).values;
  } else if (o.mode == "eta") {
    f = sample_eta(lat, green_function(lat), o.seed).values;
  } else if (o.mode == "w" || o.mode == "sigma") {
    const WeightDistribution dist = make_dist(o);
    add_dist_meta(t, o, dist);
    GaussianSource gauss(trial_stream(o.seed, 0));
    GridFunction sigma = draw_weights(lat, dist, gauss);
    f = o.mode == "sigma" ? std::move(sigma)
                          : w_field(sigma, green_function(lat));
  } else {
    throw UsageError("unknown field mode: " + o.mode);
  }
  t.add_meta("seed", fmt_seed(o.seed));
  const auto path = resolve_output_path(o.out);
  write_snapshot(path, f);
  t.add_meta("snapshot", path.string());
  const auto [lo, hi] = std::minmax_element(f.v.begin(), f.v.end());
  t.columns = {"sites", "min", "max", "mean"};
  t.rows.push_back({std::to_string(f.v.size()), format_double(*lo),
                    format_double(*hi), format_double(mean(f.v))});
  write_table(std::cout, t);
  return 0;
}

// --------------------------------------------------------------------- pair

int run_pair(const Options& o, bool seed_given) {
  Table t = new_table("pair");
  GridFunction h;
  bool from_file = !o.input.empty();
  TorusLattice lat = TorusLattice::make(o.d, o.n);
  if (from_file) {
    h = read_snapshot(o.input);
    lat = h.lat;
    t.add_meta("input", o.input);
  }
  const TestFunction u = TestFunction::parse(lat.d, o.u_spec);
  t.add_meta("u", u.describe());
  t.add_meta("d", static_cast<long long>(lat.d));
  t.add_meta("n", static_cast<long long>(lat.n));

  PairingReport report;
  report.d = lat.d;
  report.n = lat.n;
  report.mode = o.mode;
  report.seed = from_file ? 0 : o.seed;
  if (!from_file) {
    if (!seed_given) throw UsageError("pair needs --seed (or --input)");
    t.add_meta("seed", fmt_seed(o.seed));
    if (o.mode == "chi") {
      h = sample_chi(lat, o.seed).values;
    } else if (o.mode == "eta") {
      h = sample_eta(lat, green_function(lat), o.seed).values;
    } else if (o.mode == "w" || o.mode == "odometer") {
      const WeightDistribution dist = make_dist(o);
      add_dist_meta(t, o, dist);
      GaussianSource gauss(trial_stream(o.seed, 0));
      const GridFunction sigma = draw_weights(lat, dist, gauss);
      if (o.mode == "w") {
        h = w_field(sigma, green_function(lat));
      } else {
        const GridFunction s = init_configuration(sigma);
        t.add_meta("tol", o.tol);
        h = stabilize(s, o.tol, o.max_sweeps, nullptr, &g_interrupted)
                .odometer.shifted;
      }
    } else {
      throw UsageError("unknown pairing mode: " + o.mode);
    }
  }
  report.value = o.mode == "odometer" ? odometer_pairing(h, u)
                                      : pair_field(h, u);
  t.add_meta("exact_sd", std::sqrt(exact_pairing_variance(u, lat)));
  t.add_meta("norm_minus1", sobolev_norm_minus1(u));
  t.columns = {"d", "n", "mode", "value", "seed"};
  t.rows.push_back({std::to_string(report.d), std::to_string(report.n),
                    report.mode, format_double(report.value),
                    fmt_seed(report.seed)});
  emit_table(o, t);
  return 0;
}

// ------------------------------------------------------------------ moments

int run_moments(const Options& o) {
  const TorusLattice lat = TorusLattice::make(o.d, o.n);
  const WeightDistribution dist = make_dist(o);
  const TestFunction u = TestFunction::parse(o.d, o.u_spec);
  Table t = new_table("moments");
  t.add_meta("d", static_cast<long long>(lat.d));
  t.add_meta("n", static_cast<long long>(lat.n));
  add_dist_meta(t, o, dist);
  t.add_meta("u", u.describe());
  t.add_meta("seed", fmt_seed(o.seed));
  t.add_meta("trials", static_cast<long long>(o.trials));
  const double exact_var = exact_pairing_variance(u, lat);
  t.add_meta("exact_variance", exact_var);
  t.add_meta("norm_minus1", sobolev_norm_minus1(u));
  t.columns = {"m", "estimate", "se", "gaussian_target"};

  std::vector<double> samples;
  try {
    samples = mc_w_pairings(lat, dist, u, o.trials, o.seed, o.workers);
  } catch (const Interrupted&) {
    t.truncated = true;
    emit_table(o, t);
    return 130;
  }
  std::vector<double> powers(samples.size());
  for (int m = 1; m <= o.max_moment; ++m) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      powers[i] = std::pow(samples[i], m);
    const double target =
        m % 2 == 1 ? 0.0
                   : double_factorial(m - 1) * std::pow(exact_var, m / 2);
    t.rows.push_back({std::to_string(m), format_double(mean(powers)),
                      format_double(standard_error(powers)),
                      format_double(target)});
  }
  emit_table(o, t);
  return 0;
}

// -------------------------------------------------------------------- sweep

int run_sweep(const Options& o) {
  if (o.n_list.empty()) throw UsageError("sweep needs a nonempty --n-list");
  const WeightDistribution dist = make_dist(o);
  const TestFunction u = TestFunction::parse(o.d, o.u_spec);
  Table t = new_table("sweep");
  t.add_meta("d", static_cast<long long>(o.d));
  add_dist_meta(t, o, dist);
  t.add_meta("u", u.describe());
  t.add_meta("seed", fmt_seed(o.seed));
  t.add_meta("trials", static_cast<long long>(o.trials));
  t.columns = {"n", "exact_variance", "mc_variance", "mc_se", "limit_norm"};
  const double limit_norm = sobolev_norm_minus1(u);

  try {
    for (long n : o.n_list) {
      check_interrupt();
      const TorusLattice lat = TorusLattice::make(o.d, static_cast<int>(n));
      const double exact = exact_pairing_variance(u, lat);
      const auto samples =
          mc_w_pairings(lat, dist, u, o.trials, mix_seed(o.seed, n), o.workers);
      std::vector<double> sq(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i)
        sq[i] = samples[i] * samples[i];
      t.rows.push_back({std::to_string(n), format_double(exact),
                        format_double(mean(sq)),
                        format_double(standard_error(sq)),
                        format_double(limit_norm)});
    }
  } catch (const Interrupted&) {
    t.truncated = true;
    emit_table(o, t);
    return 130;
  }
  emit_table(o, t);
  return 0;
}

// ------------------------------------------------------------------ sobolev

int run_sobolev(const Options& o) {
  if (o.n_list.empty()) throw UsageError("sobolev needs a nonempty --n-list");
  Table t = new_table("sobolev");
  t.add_meta("d", static_cast<long long>(o.d));
  t.add_meta("eps", o.eps);
  t.add_meta("seed", fmt_seed(o.seed));
  t.add_meta("trials", static_cast<long long>(o.trials));
  t.add_meta("cutoff", static_cast<long long>(o.cutoff));
  t.columns = {"n", "mean_norm", "se", "tail_bound", "cutoff"};

  std::vector<double> ns, means;
  try {
    for (long n : o.n_list) {
      check_interrupt();
      const TorusLattice lat = TorusLattice::make(o.d, static_cast<int>(n));
      const long cutoff = o.cutoff > 0 ? o.cutoff : 4 * n;
      std::vector<double> norms(static_cast<std::size_t>(o.trials));
      std::vector<double> tails(static_cast<std::size_t>(o.trials));
      const std::uint64_t base = mix_seed(o.seed, n);
      parallel_for(o.trials, o.workers, [&](long i) {
        check_interrupt();
        GaussianSource gauss(trial_stream(base, static_cast<std::uint64_t>(i)));
        const GridFunction chi = sample_chi(lat, gauss);
        const SobolevNormEstimate est = sobolev_norm_field(chi, o.eps, cutoff);
        norms[static_cast<std::size_t>(i)] = est.value;
        tails[static_cast<std::size_t>(i)] = est.tail_bound;
      });
      const double worst_tail = *std::max_element(tails.begin(), tails.end());
      t.rows.push_back({std::to_string(n), format_double(mean(norms)),
                        format_double(standard_error(norms)),
                        format_double(worst_tail), std::to_string(cutoff)});
      ns.push_back(static_cast<double>(n));
      means.push_back(mean(norms));
    }
  } catch (const Interrupted&) {
    t.truncated = true;
    emit_table(o, t);
    return 130;
  }
  if (ns.size() >= 3) {
    t.add_meta("spearman_rho", spearman_rho(ns, means));
    t.add_meta("spearman_p_positive", spearman_p_positive(ns, means));
  }
  emit_table(o, t);
  return 0;
}

// ------------------------------------------------------------------- kernel

int run_kernel(const Options& o) {
  if (o.grid_steps < 1) throw UsageError("grid needs at least one point");
  Table t = new_table("kernel");
  t.add_meta("d", static_cast<long long>(o.d));
  t.add_meta("form", o.form);
  t.add_meta("kappa", o.kappa);
  t.add_meta("cutoff", static_cast<long long>(o.cutoff));
  t.add_meta("shells", static_cast<long long>(o.shells));
  t.add_meta("theta_min", o.theta_min);
  t.add_meta("theta_max", o.theta_max);
  t.add_meta("grid_steps", static_cast<long long>(o.grid_steps));
  t.columns = {"theta", "value", "tail_bound", "cutoff"};

  std::string form = o.form;
  if (form == "auto") form = o.kappa > 0.0 ? "mollified" : "bare";

  try {
    for (long j = 0; j < o.grid_steps; ++j) {
      check_interrupt();
      const double step =
          o.grid_steps == 1
              ? 0.0
              : (o.theta_max - o.theta_min) / static_cast<double>(o.grid_steps - 1);
      const double tj = o.theta_min + step * static_cast<double>(j);
      KernelQuery q;
      q.d = o.d;
      q.theta.assign(static_cast<std::size_t>(o.d), 0.0);
      q.theta[0] = tj;
      q.kappa = o.kappa;
      q.cutoff = o.cutoff;
      double value = 0.0, tail = 0.0;
      long used = 0;
      if (form == "bare") {
        const KernelValue kv = kernel_lowdim(q, o.workers);
        value = kv.value;
        tail = kv.tail_bound;
        used = kv.cutoff;
      } else if (form == "mollified") {
        const KernelValue kv = kernel_mollified(q, o.workers);
        value = kv.value;
        tail = kv.tail_bound;
        used = kv.cutoff;
      } else if (form == "singular") {
        value = periodized_singularity(o.d, q.theta, o.shells);
        used = o.shells;
      } else if (form == "limit") {
        value = periodized_kernel_limit(o.d, q.theta);
      } else {
        throw UsageError("unknown kernel form: " + o.form);
      }
      t.rows.push_back({format_double(tj), format_double(value),
                        format_double(tail), std::to_string(used)});
    }
  } catch (const Interrupted&) {
    t.truncated = true;
    emit_table(o, t);
    return 130;
  }
  emit_table(o, t);
  return 0;
}

// ------------------------------------------------------------ verify-bounds

int run_verify_bounds(const Options& o) {
  Table t = new_table("verify-bounds");
  t.add_meta("d_max", static_cast<long long>(o.d_max));
  t.add_meta("n_max", static_cast<long long>(o.n_max));
  t.columns = {"d", "n", "min_left_margin", "min_lower_margin",
               "max_c_required"};
  // Exact-equality corners (|w_i| = n/2) sit at margin zero; allow rounding.
  const double slack = 1e-9;
  const double c_reference = 0.6;  // just above the d=1 corner 1 - 4/pi^2
  bool pass = true;
  double c_emp = -HUGE_VAL;
  for (int d = 1; d <= o.d_max; ++d) {
    for (int n = 2; n <= o.n_max; ++n) {
      check_interrupt();
      const TorusLattice lat = TorusLattice::make(d, n);
      if (lat.size > (1u << 22)) continue;  // keep the exhaustive scan bounded
      const EigenBoundScan scan = scan_eigenvalue_bounds(lat);
      if (scan.min_left_margin < -slack || scan.min_lower_margin < -slack)
        pass = false;
      c_emp = std::max(c_emp, scan.max_c_required);
      t.rows.push_back({std::to_string(d), std::to_string(n),
                        format_double(scan.min_left_margin),
                        format_double(scan.min_lower_margin),
                        format_double(scan.max_c_required)});
    }
  }
  if (c_emp > c_reference) pass = false;
  t.add_meta("c_empirical", c_emp);
  t.add_meta("c_reference", c_reference);
  t.add_meta("pass", static_cast<long long>(pass ? 1 : 0));
  emit_table(o, t);
  return pass ? 0 : 1;
}

// ------------------------------------------------------------------ hitting

int run_hitting(const Options& o) {
  const TorusLattice lat = TorusLattice::make(o.d, o.n);
  Table t = new_table("hitting");
  t.add_meta("d", static_cast<long long>(lat.d));
  t.add_meta("n", static_cast<long long>(lat.n));
  const GridFunction h = expected_hitting_time(lat, 0);
  const double l_spec = mass_constant_L(lat, MassConstantMethod::spectral);
  const double l_hit = mass_constant_L(lat, MassConstantMethod::hitting);
  t.add_meta("L_spectral", l_spec);
  t.add_meta("L_hitting", l_hit);
  t.add_meta("L_abs_diff", std::abs(l_spec - l_hit));
  t.columns = {"site", "hitting_time"};
  for (std::size_t x = 0; x < lat.size; ++x)
    t.rows.push_back({std::to_string(x), format_double(h.v[x])});
  emit_table(o, t);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  std::signal(SIGINT, sigint_handler);
  Options o;

  CLI::App app{"divisible sandpile laboratory on the discrete torus"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "",
                 "key = value file, one [section] per subcommand");
  app.require_subcommand(1);

  const auto add_lattice = [&](CLI::App* c) {
    c->add_option("--d", o.d, "lattice dimension")->capture_default_str();
    c->add_option("--n", o.n, "torus side length")->capture_default_str();
  };
  const auto add_dist = [&](CLI::App* c) {
    c->add_option("--dist", o.dist,
                  "weight law: gaussian|rademacher|uniform|truncated")
        ->capture_default_str();
    c->add_option("--radius", o.radius, "truncation level for truncated")
        ->capture_default_str();
  };
  const auto add_seed = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--seed", o.seed, "base RNG seed");
    if (required) opt->required();
    return opt;
  };
  const auto add_workers = [&](CLI::App* c) {
    c->add_option("--workers", o.workers,
                  "worker threads (0 = all cores); never changes results");
  };
  const auto add_out = [&](CLI::App* c) {
    c->add_option("--out", o.out,
                  "output path (relative paths land under OUTPUT_DIR)");
  };
  const auto add_u = [&](CLI::App* c) {
    c->add_option("--u", o.u_spec,
                  "test function \"nu:coeff,...\", nu components joined by _")
        ->required();
  };

  CLI::App* stab = app.add_subcommand(
      "stabilize", "relax one weight configuration to mass <= 1 everywhere");
  add_lattice(stab);
  add_dist(stab);
  add_seed(stab, false);
  stab->add_option("--input", o.input, "weight snapshot (.dsod) to stabilize");
  stab->add_option("--tol", o.tol, "stability tolerance")->capture_default_str();
  stab->add_option("--max-sweeps", o.max_sweeps, "sweep budget")
      ->capture_default_str();
  add_out(stab);

  CLI::App* cmp = app.add_subcommand(
      "odometer-compare", "dynamic vs spectral odometer sup distance");
  add_lattice(cmp);
  add_dist(cmp);
  add_seed(cmp, true);
  cmp->add_option("--trials", o.trials, "independent runs")
      ->capture_default_str();
  cmp->add_option("--tol", o.tol, "stability tolerance")->capture_default_str();
  cmp->add_option("--max-sweeps", o.max_sweeps, "sweep budget")
      ->capture_default_str();
  add_workers(cmp);
  add_out(cmp);

  CLI::App* sample = app.add_subcommand(
      "sample-field", "write one field sample as a binary snapshot");
  add_lattice(sample);
  add_dist(sample);
  add_seed(sample, true);
  sample->add_option("--mode", o.mode, "chi|eta|w|sigma")->required();
  add_out(sample);

  CLI::App* pair = app.add_subcommand(
      "pair", "pair one field sample against a test function");
  add_lattice(pair);
  add_dist(pair);
  add_seed(pair, false);
  pair->add_option("--mode", o.mode, "odometer|chi|eta|w")->required();
  pair->add_option("--input", o.input, "pair a stored snapshot instead");
  pair->add_option("--tol", o.tol, "stability tolerance (odometer mode)")
      ->capture_default_str();
  add_u(pair);
  add_out(pair);

  CLI::App* mom = app.add_subcommand(
      "moments", "Monte Carlo pairing moments against exact targets");
  add_lattice(mom);
  add_dist(mom);
  add_seed(mom, true);
  add_u(mom);
  mom->add_option("--trials", o.trials, "Monte Carlo trials")
      ->capture_default_str();
  mom->add_option("--max-moment", o.max_moment, "report m = 1..max")
      ->capture_default_str();
  add_workers(mom);
  add_out(mom);

  CLI::App* swp = app.add_subcommand(
      "sweep", "exact and Monte Carlo pairing variance across n");
  swp->add_option("--d", o.d, "lattice dimension")->capture_default_str();
  swp->add_option("--n-list", o.n_list, "torus sides, comma separated")
      ->delimiter(',')
      ->required();
  add_dist(swp);
  add_seed(swp, true);
  add_u(swp);
  swp->add_option("--trials", o.trials, "Monte Carlo trials per n")
      ->capture_default_str();
  add_workers(swp);
  add_out(swp);

  CLI::App* sob = app.add_subcommand(
      "sobolev", "negative Sobolev norm of sampled fields across n");
  sob->add_option("--d", o.d, "lattice dimension")->capture_default_str();
  sob->add_option("--n-list", o.n_list, "torus sides, comma separated")
      ->delimiter(',')
      ->required();
  sob->add_option("--eps", o.eps, "Sobolev order (> max(1+d/4, d/2))")
      ->capture_default_str();
  sob->add_option("--cutoff", o.cutoff, "frequency cutoff M (0 = 4n)")
      ->capture_default_str();
  add_seed(sob, true);
  sob->add_option("--trials", o.trials, "samples per n")->capture_default_str();
  add_workers(sob);
  add_out(sob);

  CLI::App* ker = app.add_subcommand(
      "kernel", "continuum kernel values on an axis-aligned theta grid");
  ker->add_option("--d", o.d, "dimension")->capture_default_str();
  ker->add_option("--kappa", o.kappa, "mollification scale (0 = bare)")
      ->capture_default_str();
  ker->add_option("--cutoff", o.cutoff, "frequency cutoff (0 = automatic)")
      ->capture_default_str();
  ker->add_option("--form", o.form, "auto|bare|mollified|singular|limit")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "bare", "mollified", "singular", "limit"}));
  ker->add_option("--shells", o.shells, "image shells (singular form)")
      ->capture_default_str();
  ker->add_option("--theta-min", o.theta_min, "grid start")
      ->capture_default_str();
  ker->add_option("--theta-max", o.theta_max, "grid end")->capture_default_str();
  ker->add_option("--grid-steps", o.grid_steps, "grid point count")
      ->capture_default_str();
  add_workers(ker);
  add_out(ker);

  CLI::App* vb = app.add_subcommand(
      "verify-bounds", "exhaustive eigenvalue bound scan over (d, n)");
  vb->add_option("--d-max", o.d_max, "largest dimension")->capture_default_str();
  vb->add_option("--n-max", o.n_max, "largest torus side")
      ->capture_default_str();
  add_out(vb);

  CLI::App* hit = app.add_subcommand(
      "hitting", "expected hitting times of the origin and the mass constant");
  add_lattice(hit);
  add_out(hit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (*stab)
      code = run_stabilize(o, stab->count("--seed") > 0);
    else if (*cmp)
      code = run_odometer_compare(o);
    else if (*sample)
      code = run_sample_field(o);
    else if (*pair)
      code = run_pair(o, pair->count("--seed") > 0);
    else if (*mom)
      code = run_moments(o);
    else if (*swp)
      code = run_sweep(o);
    else if (*sob)
      code = run_sobolev(o);
    else if (*ker)
      code = run_kernel(o);
    else if (*vb)
      code = run_verify_bounds(o);
    else if (*hit)
      code = run_hitting(o);
  } catch (const Interrupted&) {
    code = 130;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 2;
  } catch (const MathDomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 3;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 1;
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  std::fprintf(stderr, "# wall_clock_s = %.3f\n", elapsed.count());
  return code;
}

}  // namespace dsod
