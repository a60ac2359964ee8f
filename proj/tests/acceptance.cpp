// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ldg/balls.hpp"
#include "ldg/builders.hpp"
#include "ldg/defects.hpp"
#include "ldg/diagnostics.hpp"
#include "ldg/experiment.hpp"
#include "ldg/relax.hpp"
#include "support.hpp"

using namespace ldg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const MaterialParams& params() { return test::default_params(); }

// 1. Closed-form class energies of the geodesic representatives.
Outcome class_energy_table() {
  const auto& p = params();
  const double k = p.kappa_star;
  const std::vector<std::pair<LoopFn, double>> cases{
      {loop_a0(p), k}, {loop_b0(p), k}, {loop_l2(p), 4 * k}, {loop_l3(p), 4 * k}};
  double worst = 0;
  for (const auto& [f, want] : cases) worst = std::max(worst, test::rel_err(loop_energy(sample_loop(f, 4096)), want));
  return {worst < 1e-4 && std::abs(k - std::numbers::pi * p.r_star * p.r_star / 2) < 1e-15,
          fmt("max relative error %.2e (tol 1e-4)", worst)};
}

// 2. Regression loops classify exactly.
Outcome q8_classification() {
  const auto& p = params();
  int wrong = 0;
  std::string names;
  const auto loops = test::regression_loops(p);
  for (const auto& l : loops) {
    ClassTag got = ClassTag::H0;
    bool ok = true;
    try {
      got = classify(l.loop, p).tag;
    } catch (const Error&) {
      ok = false;
    }
    if (!ok || got != l.expected) {
      ++wrong;
      names += " " + l.name;
    }
  }
  return {wrong == 0, fmt("%d of %zu misclassified%s", wrong, loops.size(), names.c_str())};
}

// 3. Wells identities on the manifold and the bulk gradient against finite differences.
Outcome well_identities() {
  const auto& p = params();
  std::mt19937_64 rng(301);
  double worst_f = 0, worst_psi = 0, worst_gap = 0;
  for (int i = 0; i < 10000; ++i) {
    const QTensor q = test::random_point(rng, p).q;
    worst_f = std::max(worst_f, bulk_energy(q, p) / p.a1);
    worst_psi = std::max(worst_psi, norm(bulk_gradient(q, p)) / p.a2);
    const WellsGap w = wells_gap(q, p);
    worst_gap = std::max({worst_gap, std::abs(w.zeta) / std::pow(p.r_star, 4), std::abs(w.xi) / std::pow(p.r_star, 4)});
  }
  double worst_fd = 0;
  for (int i = 0; i < 1000; ++i) {
    const QTensor q = test::random_tensor(rng, 0.8 * p.r_star);
    const QTensor g = bulk_gradient(q, p);
    const double step = 1e-5 * (1 + norm(q));
    QTensor fd;
    for (int k = 0; k < 5; ++k) {
      QTensor a = q, b = q;
      a[k] += step;
      b[k] -= step;
      fd[k] = (bulk_energy(a, p) - bulk_energy(b, p)) / (2 * step);
    }
    worst_fd = std::max(worst_fd, norm(fd - g) / std::max(1.0, norm(g)));
  }
  const bool pass = worst_f <= 1e-12 && worst_psi <= 1e-12 && worst_gap <= 1e-12 && worst_fd <= 1e-6;
  return {pass, fmt("f_b %.1e, Psi %.1e, zeta/xi %.1e on 1e4 points; FD gradient %.1e on 1e3 tensors", worst_f,
                    worst_psi, worst_gap, worst_fd)};
}

// 4. Sandwich between phi_tau and phi0, and the gradient inequality along curves.
Outcome phi_inequalities() {
  const auto& p = params();
  std::mt19937_64 rng(401);
  const double tau = 0.25;
  int sandwich = 0;
  for (int i = 0; i < 100000; ++i) {
    const Biaxiality b = biaxiality(test::random_tensor(rng, p.r_star), tau, p);
    if (b.phi_tau > b.phi0 + 1e-8 || b.phi0 > 6.0 / (6 - 5 * tau) * b.phi_tau + 1e-8) ++sandwich;
  }
  struct Curve {
    QTensor a, b, c, d;
    QTensor at(double t) const { return a + t * b + (t * t) * c + std::sin(3 * t) * d; }
  };
  auto nearest = [&](const QTensor& q) { return project(q, p).q; };
  const double dt = 1e-5;
  int gradient = 0, used = 0;
  for (int i = 0; i < 1000; ++i) {
    const double s = 0.8 * p.r_star;
    const Curve c{test::random_tensor(rng, s), test::random_tensor(rng, s), test::random_tensor(rng, s),
                  test::random_tensor(rng, 0.3 * s)};
    for (double t : {-0.5, 0.0, 0.3, 0.7}) {
      if (biaxiality(c.at(t), tau, p).phi0 < 1e-3) continue;
      const QTensor dg = (1 / (2 * dt)) * (c.at(t + dt) - c.at(t - dt));
      const double f = biaxiality(c.at(t), tau, p).phi_tau;
      const double df = (biaxiality(c.at(t + dt), tau, p).phi_tau - biaxiality(c.at(t - dt), tau, p).phi_tau) / (2 * dt);
      const QTensor dr = (1 / (2 * dt)) * (nearest(c.at(t + dt)) - nearest(c.at(t - dt)));
      const double lhs = norm_sq(dg);
      const double rhs = p.r_star * p.r_star / 18 * df * df + f * f * norm_sq(dr);
      ++used;
      if (rhs > lhs + 1e-8 * std::max(1.0, lhs)) ++gradient;
    }
  }
  return {sandwich == 0 && gradient == 0,
          fmt("sandwich violations %d / 1e5, gradient violations %d / %d curve points", sandwich, gradient, used)};
}

// Relaxed fields shared by the max principle and the PDE-identity checks.
struct SuiteEntry {
  std::string name;
  RelaxResult result;
  double boundary_max = 0;
  std::vector<Vec3> centers;
  std::vector<std::pair<Vec3, double>> balls;
};

RelaxResult relax_with(const Field& init, double tol) {
  SolveConfig cfg;
  cfg.grad_tol = tol;
  cfg.max_iters = 50000;
  try {
    return relax(init, cfg);
  } catch (const StagnationError& e) {
    return e.partial();
  }
}

const std::vector<SuiteEntry>& regression_suite() {
  static const std::vector<SuiteEntry> suite = [] {
    const auto& p = params();
    std::vector<SuiteEntry> out;
    const std::vector<Vec3> disk_centers{{0, 0, 0}, {0.3, 0.2, 0}, {-0.2, -0.4, 0}};
    const std::vector<std::pair<Vec3, double>> disk_balls{{{0, 0, 0}, 0.5}, {{0.3, 0.2, 0}, 0.4}, {{0, 0, 0}, 0.8}};
    for (ClassTag t : {ClassTag::H0, ClassTag::H1, ClassTag::H2, ClassTag::H3, ClassTag::H4}) {
      const Field init = disk_problem(t, 1.0, 0.1, 1.0 / 64, p);
      out.push_back({std::string("disk ") + to_string(t), relax_with(init, 1e-6), max_boundary_norm(init),
                     disk_centers, disk_balls});
    }
    {
      // Boundary data pushed off the manifold: the bound is the boundary maximum.
      Field init = disk_problem(ClassTag::H1, 1.0, 0.1, 1.0 / 64, p);
      for (QTensor& q : init.values) q *= 1.3;
      out.push_back({"disk H1 scaled", relax_with(init, 1e-6), max_boundary_norm(init), disk_centers, disk_balls});
    }
    {
      const Field init = annulus_problem(loop_a0(p), 0.5, 1.0, 0.1, 1.0 / 64, p);
      out.push_back({"annulus", relax_with(init, 1e-6), max_boundary_norm(init),
                     {{0.75, 0, 0}, {0, 0.75, 0}, {-0.53, -0.53, 0}},
                     {{{0.75, 0, 0}, 0.2}, {{0, -0.75, 0}, 0.2}}});
    }
    for (ClassTag t : {ClassTag::H1, ClassTag::H4}) {
      const CoreAnsatz a = core_ansatz(t, 0.25, p);
      const Field init = cylinder_boundary(a.trace(0.5), 0.5, 0.5, 0.1, 1.0 / 32, p,
                                           [a](Vec3 x) { return a.tensor(x, 0.1); });
      out.push_back({std::string("cylinder ") + to_string(t), relax_with(init, 1e-6), max_boundary_norm(init),
                     {{0, 0, 0}, {0.1, 0.1, 0.1}, {0, 0, -0.2}},
                     {{{0, 0, 0}, 0.4}, {{0, 0, 0.1}, 0.3}}});
    }
    return out;
  }();
  return suite;
}

// 5. Max principle on every relaxed field of the suite.
Outcome max_principle() {
  const auto& p = params();
  int bad = 0;
  double worst = -1e300;
  for (const SuiteEntry& e : regression_suite()) {
    const double bound = std::max(std::sqrt(2.0) * p.r_star, e.boundary_max) + 1e-6;
    const double excess = max_norm(e.result.field) - bound;
    worst = std::max(worst, excess);
    if (excess > 0) ++bad;
  }
  return {bad == 0, fmt("%d of %zu fields above the bound; worst max|Q| - bound = %.2e", bad,
                        regression_suite().size(), worst)};
}

// 6. Monotonicity at three centers and the Pohozaev balance on converged fields.
Outcome monotonicity_pohozaev() {
  int converged = 0, mono_fail = 0;
  double worst_poh = 0;
  std::string failed, skipped;
  for (const SuiteEntry& e : regression_suite()) {
    if (e.result.status != SolveStatus::Converged) {
      skipped += fmt(" %s (%.1e)", e.name.c_str(), e.result.residual);
      continue;
    }
    ++converged;
    DiagnosticsOptions opt;
    opt.centers = e.centers;
    opt.pohozaev_balls = e.balls;
    const Diagnostics d = diagnostics(e.result.field, opt);
    for (const MonotonicityCheck& m : d.monotonicity)
      if (!m.monotone) {
        ++mono_fail;
        failed += " " + e.name;
      }
    for (const PohozaevCheck& pc : d.pohozaev) worst_poh = std::max(worst_poh, pc.defect);
  }
  const bool pass = converged >= 5 && mono_fail == 0 && worst_poh < 0.05;
  return {pass, fmt("%d converged fields, %d non-monotone profiles%s, worst Pohozaev defect %.2e (tol 5e-2)%s%s",
                    converged, mono_fail, failed.c_str(), worst_poh, skipped.empty() ? "" : "; not converged:",
                    skipped.c_str())};
}

// 7. Energy slopes against log(1/eps) on disks.
Outcome log_law_slopes() {
  const auto& p = params();
  const double k = p.kappa_star;
  const std::vector<double> eps{0.1, 0.05, 0.025};
  const std::array<double, 5> target{0, k, k, 2 * k, 2 * k};
  bool pass = true;
  std::string detail;
  for (int t = 0; t < 5; ++t) {
    std::vector<double> energy;
    for (double e : eps) energy.push_back(relax_with(disk_problem(ClassTag(t), 1.0, e, 1.0 / 128, p), 1e-6).energy);
    const double slope = log_slope(eps, energy);
    // The trivial class has a zero target; its tolerance is 15% of kappa*.
    const double tol = 0.15 * (t == 0 ? k : target[t]);
    pass = pass && std::abs(slope - target[t]) <= tol;
    detail += fmt("%sH%d %.3f", t ? ", " : "", t, slope / k);
  }
  return {pass, "slopes / kappa*: " + detail + " (targets 0, 1, 1, 2, 2 within 15%)"};
}

// 8. Ball-construction bound on the homogeneous field and the seed invariant under fuzzing.
Outcome ball_construction_bound() {
  const auto& p = params();
  const LoopFn a0 = loop_a0(p);
  // Polar quadrature of the degree-zero extension: the radial factor is exact
  // and the angular factor is Richardson-extrapolated in the step.
  auto angular = [&](int n) {
    const double dt = 2 * std::numbers::pi / n;
    double e = 0;
    for (int k = 0; k < n; ++k) {
      const QTensor d = (1.0 / (2 * dt)) * (a0((k + 1) * dt).q - a0((k - 1) * dt).q);
      e += 0.5 * norm_sq(d) * dt;
    }
    return e;
  };
  const double loop_e = (4 * angular(1 << 13) - angular(1 << 12)) / 3;
  bool pass = true;
  std::string detail;
  for (double s : {0.01, 0.02, 0.05}) {
    BallSystem sys;
    sys.balls.push_back({{0, 0, 0}, s, e_star(ClassTag::H1, p)});
    const BallConstruction bc = ball_construction(sys, 19.0 / 40, 1.0);
    const double measured = loop_e * std::log(1 / s);
    pass = pass && measured >= bc.bound - 1e-12 * bc.bound && bc.invariant_violations == 0;
    detail += fmt("s=%.2f E-bound=%.1e; ", s, measured - bc.bound);
  }
  std::mt19937_64 rng(801);
  std::uniform_real_distribution<double> u(-1, 1), rad(1e-4, 5e-3), wt(0.5, 3);
  int seed_fail = 0, events = 0;
  for (int trial = 0; trial < 100; ++trial) {
    BallSystem sys;
    const int k = 1 + trial % 8;
    while (static_cast<int>(sys.balls.size()) < k) {
      const Vec3 c{0.05 * u(rng), 0.05 * u(rng), 0};
      const double s = rad(rng);
      if (norm(c) + s <= 0.05) sys.balls.push_back({c, s, wt(rng)});
    }
    const BallConstruction bc = ball_construction(sys, 19.0 / 40, 1.0);
    seed_fail += bc.invariant_violations;
    for (const MergeEvent& e : bc.trace) {
      ++events;
      if (e.seed > e.initial_sum * (1 + 1e-10)) ++seed_fail;
    }
  }
  pass = pass && seed_fail == 0;
  return {pass, detail + fmt("fuzz: %d seed violations over %d events", seed_fail, events)};
}

// 9. Line densities from the energy per unit length on relaxed cylinders.
Outcome density_dichotomy() {
  const auto& p = params();
  const double k = p.kappa_star;
  const std::vector<double> eps{0.1, 0.05};
  const double radius = 1.0, half_length = 0.5, h = 1.0 / 32;
  bool pass = true;
  std::string detail;
  for (auto [tag, target] : {std::pair{ClassTag::H1, k}, std::pair{ClassTag::H4, 2 * k}}) {
    const CoreAnsatz a = core_ansatz(tag, 0.5, p);
    std::vector<double> tube;
    for (double e : eps) {
      const Field init =
          cylinder_boundary(a.trace(radius), radius, half_length, e, h, p, [a, e](Vec3 x) { return a.tensor(x, e); });
      const RelaxResult r = relax_with(init, 1e-6);
      tube.push_back(tube_energy_density(r.field, {}, radius, 0.5 * half_length));
    }
    const double theta = log_slope(eps, tube);
    pass = pass && std::abs(theta - target) <= 0.2 * target;
    detail += fmt("%s %.3f kappa* (target %.0f); ", to_string(tag).c_str(), theta / k, target / k);
  }
  return {pass, detail + "tol 20%"};
}

// 10. Distance to the manifold on a defect-free annulus scales like eps^2.
Outcome wall_distance() {
  const auto& p = params();
  std::vector<double> dist;
  for (double e : {0.1, 0.05}) {
    const RelaxResult r = relax_with(annulus_problem(loop_a0(p), 0.5, 1.0, e, 1.0 / 128, p), 1e-7);
    dist.push_back(diagnostics(r.field, {}).dist_sup);
  }
  const double ratio = dist[0] / dist[1];
  return {ratio >= 2.5 && ratio <= 6.0,
          fmt("sup dist %.3e -> %.3e, ratio %.3f (window [2.5, 6])", dist[0], dist[1], ratio)};
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// 11. Deterministic sweeps reproduce their CSV and snapshots bit for bit.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("ldg_accept_" + std::to_string(std::random_device{}()));
  const std::vector<json> configs{
      {{"domain", {{"kind", "disk2d"}, {"extents", {1.0}}, {"h", 1.0 / 32}}},
       {"boundary", {{"class", "H3"}}},
       {"eps", {0.1, 0.05}},
       {"perturbation", 0.01},
       {"seed", 3}},
      {{"domain", {{"kind", "cylinder3d"}, {"extents", {0.5, 0.25}}, {"h", 1.0 / 16}}},
       {"boundary", {{"class", "H1"}}},
       {"eps", {0.2, 0.1}}},
  };
  int differing = 0, compared = 0;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::vector<fs::path> dirs;
    for (int run = 0; run < 2; ++run) {
      json j = configs[c];
      j["deterministic"] = true;
      j["output"] = (root / fmt("c%zu_r%d", c, run)).string();
      run_sweep(config_from_json(j));
      dirs.push_back(j["output"].get<std::string>());
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const std::string name = entry.path().filename().string();
      if (name == "sweep.json") continue;  // embeds the output path
      ++compared;
      if (slurp(entry.path()) != slurp(dirs[1] / name)) ++differing;
    }
  }
  fs::remove_all(root);
  return {differing == 0 && compared >= 4, fmt("%d of %d output files differ between runs", differing, compared)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"class-energy table", class_energy_table},
      {"Q8 classification", q8_classification},
      {"well identities", well_identities},
      {"phi sandwich and gradient inequality", phi_inequalities},
      {"max principle", max_principle},
      {"monotonicity and Pohozaev", monotonicity_pohozaev},
      {"log-law slopes", log_law_slopes},
      {"ball construction", ball_construction_bound},
      {"density dichotomy", density_dichotomy},
      {"wall distance O(eps^2)", wall_distance},
      {"determinism", determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (std::size_t i = 1; i <= criteria.size(); ++i) selected.push_back(static_cast<int>(i));

  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const auto& [name, fn] = criteria[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
