#include "ldg/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "ldg/builders.hpp"
#include "ldg/manifold.hpp"

namespace ldg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<ClassTag> tag_from_string(const std::string& s) {
  for (ClassTag t : {ClassTag::H0, ClassTag::H1, ClassTag::H2, ClassTag::H3, ClassTag::H4})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

Method method_from_string(const std::string& s) {
  if (s == "lbfgs") return Method::Lbfgs;
  if (s == "steepest") return Method::Steepest;
  throw Error(ErrorKind::InvalidParameter, "unknown solver method " + s);
}

// Piecewise-linear interpolation of the sampled tensors, projected back to N.
LoopFn loop_fn(const NLoop& loop, const MaterialParams& p) {
  return [loop, p](double th) {
    const std::size_t n = loop.size();
    double u = th / (2.0 * std::numbers::pi) * n;
    u -= std::floor(u / n) * n;
    const std::size_t i = static_cast<std::size_t>(u) % n;
    const double w = u - std::floor(u);
    return project((1 - w) * loop.samples[i].q + w * loop.samples[(i + 1) % n].q, p);
  };
}

LoopFn boundary_loop(const ExperimentConfig& c) {
  if (c.boundary_class) return representative(*c.boundary_class, c.params);
  return loop_fn(read_loop_csv(c.loop_file, c.params), c.params);
}

void perturb(Field& f, std::uint64_t seed, double amplitude) {
  if (amplitude == 0) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    if (f.domain.mask[idx] != NodeType::Interior) continue;
    for (double& v : f.values[idx].c) v += amplitude * u(rng);
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("params")) c.params = params_from_json(j.at("params"));
    if (j.contains("domain")) {
      const json& d = j.at("domain");
      c.domain = domain_kind_from_string(d.at("kind").get<std::string>());
      const auto ext = d.at("extents").get<std::vector<double>>();
      if (ext.empty() || ext.size() > 3) throw Error(ErrorKind::InvalidParameter, "extents needs 1 to 3 numbers");
      c.extents = {0, 0, 0};
      for (std::size_t i = 0; i < ext.size(); ++i) c.extents[i] = ext[i];
      c.h = d.at("h").get<double>();
    }
    if (j.contains("boundary")) {
      const json& b = j.at("boundary");
      if (b.contains("class")) {
        c.boundary_class = tag_from_string(b.at("class").get<std::string>());
        if (!c.boundary_class) throw Error(ErrorKind::InvalidParameter, "unknown class " + b.at("class").dump());
      } else if (b.contains("loop_file")) {
        c.boundary_class.reset();
        c.loop_file = b.at("loop_file").get<std::string>();
      } else {
        throw Error(ErrorKind::InvalidParameter, "boundary needs class or loop_file");
      }
      c.separation = b.value("separation", c.separation);
    }
    if (j.contains("eps")) c.eps = j.at("eps").get<std::vector<double>>();
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      c.solver.max_iters = s.value("max_iters", c.solver.max_iters);
      c.solver.grad_tol = s.value("grad_tol", c.solver.grad_tol);
      c.solver.method = method_from_string(s.value("method", std::string("lbfgs")));
      c.solver.lbfgs_memory = s.value("lbfgs_memory", c.solver.lbfgs_memory);
      const std::string step = s.value("step", std::string("backtracking"));
      if (step != "backtracking" && step != "fixed") throw Error(ErrorKind::InvalidParameter, "unknown step policy");
      c.solver.step = step == "fixed" ? StepPolicy::Fixed : StepPolicy::Backtracking;
    }
    c.output_dir = j.value("output", c.output_dir);
    c.seed = j.value("seed", c.seed);
    c.perturbation = j.value("perturbation", c.perturbation);
    c.deterministic = j.value("deterministic", c.deterministic);
    c.snapshots = j.value("snapshots", c.snapshots);
    if (j.contains("analysis")) {
      const json& a = j.at("analysis");
      c.mask_threshold = a.value("mask_threshold", c.mask_threshold);
      if (a.contains("density_centers")) {
        c.density_centers.clear();
        for (const auto& v : a.at("density_centers")) {
          const auto x = v.get<std::vector<double>>();
          if (x.size() != 3) throw Error(ErrorKind::InvalidParameter, "centers are 3-vectors");
          c.density_centers.push_back({x[0], x[1], x[2]});
        }
      }
      if (a.contains("density_radii")) c.density_radii = a.at("density_radii").get<std::vector<double>>();
      c.lower_bound_radius = a.value("lower_bound_radius", c.lower_bound_radius);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidParameter, std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json centers = json::array();
  for (const Vec3& v : c.density_centers) centers.push_back({v.x, v.y, v.z});
  json boundary = c.boundary_class ? json{{"class", to_string(*c.boundary_class)}} : json{{"loop_file", c.loop_file}};
  boundary["separation"] = c.separation;
  return {{"params", {{"a2", c.params.a2}, {"a4", c.params.a4}, {"a6", c.params.a6}, {"a6p", c.params.a6p}}},
          {"domain", {{"kind", to_string(c.domain)}, {"extents", c.extents}, {"h", c.h}}},
          {"boundary", boundary},
          {"eps", c.eps},
          {"solver",
           {{"max_iters", c.solver.max_iters},
            {"grad_tol", c.solver.grad_tol},
            {"method", c.solver.method == Method::Lbfgs ? "lbfgs" : "steepest"},
            {"lbfgs_memory", c.solver.lbfgs_memory},
            {"step", c.solver.step == StepPolicy::Fixed ? "fixed" : "backtracking"}}},
          {"output", c.output_dir},
          {"seed", c.seed},
          {"perturbation", c.perturbation},
          {"deterministic", c.deterministic},
          {"snapshots", c.snapshots},
          {"analysis",
           {{"mask_threshold", c.mask_threshold},
            {"density_centers", centers},
            {"density_radii", c.density_radii},
            {"lower_bound_radius", c.lower_bound_radius}}}};
}

void validate(const ExperimentConfig& c) {
  if (c.eps.empty()) throw Error(ErrorKind::InvalidParameter, "eps list is empty");
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    if (!(c.eps[i] > 0)) throw Error(ErrorKind::InvalidParameter, "eps values must be positive");
    if (i > 0 && !(c.eps[i] < c.eps[i - 1]))
      throw Error(ErrorKind::InvalidParameter, "eps list must be strictly decreasing");
  }
  if (!(c.h > 0)) throw Error(ErrorKind::InvalidParameter, "grid spacing must be positive");
  if (!(c.solver.grad_tol > 0) || c.solver.max_iters == 0)
    throw Error(ErrorKind::InvalidParameter, "solver tolerances must be positive");
  if (!(c.mask_threshold > 0 && c.mask_threshold < 1))
    throw Error(ErrorKind::InvalidParameter, "mask threshold must lie in (0, 1)");
  if (!c.boundary_class && c.loop_file.empty()) throw Error(ErrorKind::InvalidParameter, "no boundary data");
  if (c.output_dir.empty()) throw Error(ErrorKind::InvalidParameter, "output directory is empty");
}

Field build_problem(const ExperimentConfig& c, double eps) {
  const MaterialParams& p = c.params;
  const auto& e = c.extents;
  Field f;
  switch (c.domain) {
    case DomainKind::Disk2d:
      if (c.boundary_class) {
        f = disk_problem(*c.boundary_class, e[0], eps, c.h, p, c.separation);
      } else {
        f = make_field(make_disk2d(e[0], c.h), eps, p);
        const LoopFn loop = boundary_loop(c);
        fill(f, [&](Vec3 x) { return loop(std::atan2(x.y, x.x)).q; }, FillTarget::Boundary);
        fill(f, radial_extension(loop, eps), FillTarget::Interior);
      }
      break;
    case DomainKind::Cylinder3d:
      if (c.boundary_class && *c.boundary_class == ClassTag::H0) {
        f = cylinder_boundary(loop_wiggle(p), e[0], e[1], eps, c.h, p, wiggle_extension(e[0], p));
      } else if (c.boundary_class) {
        const CoreAnsatz a = core_ansatz(*c.boundary_class, c.separation, p);
        f = cylinder_boundary(a.trace(e[0]), e[0], e[1], eps, c.h, p, [a, eps](Vec3 x) { return a.tensor(x, eps); });
      } else {
        f = cylinder_boundary(boundary_loop(c), e[0], e[1], eps, c.h, p);
      }
      break;
    case DomainKind::Annulus2d:
      f = annulus_problem(boundary_loop(c), e[0], e[1], eps, c.h, p);
      break;
    case DomainKind::Square2d:
    case DomainKind::Box3d:
      f = make_field(make_domain(c.domain, e, c.h), eps, p);
      fill(f, radial_extension(boundary_loop(c), eps));
      break;
  }
  perturb(f, c.seed, c.perturbation);
  return f;
}

std::string sweep_csv_header() {
  return "eps,E_total,E_dirichlet,E_bulk,slope,mass,theta,theta_slope,lb_main,lb_measured,lb_margin,"
         "iterations,residual,status";
}

std::string sweep_csv_row(const SweepRow& r) {
  return num(r.eps) + ',' + num(r.e_total) + ',' + num(r.e_dirichlet) + ',' + num(r.e_bulk) + ',' + num(r.slope) +
         ',' + num(r.mass) + ',' + num(r.theta) + ',' + num(r.theta_slope) + ',' + num(r.lb_main) + ',' +
         num(r.lb_measured) + ',' + num(r.lb_margin) + ',' + std::to_string(r.iterations) + ',' + num(r.residual) +
         ',' + r.status;
}

RelaxResult run_relax(const ExperimentConfig& c, double eps) {
  SolveConfig sc = c.solver;
  sc.reduction = c.deterministic ? Reduction::Deterministic : Reduction::Fast;
  return relax(build_problem(c, eps), sc);
}

SweepReport run_sweep(const ExperimentConfig& c) {
  validate(c);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + c.output_dir + ": " + ec.message());

  SweepReport rep;
  rep.csv_path = (fs::path(c.output_dir) / "sweep.csv").string();
  std::vector<double> eps_seen, energy_seen, tube_seen;
  json summary = {{"config", to_json(c)}, {"rows", json::array()}};
  for (std::size_t k = 0; k < c.eps.size(); ++k) {
    const double eps = c.eps[k];
    SweepRow row;
    row.eps = eps;
    RelaxResult rr;
    try {
      rr = run_relax(c, eps);
      row.status = to_string(rr.status);
    } catch (const StagnationError& e) {
      rr = e.partial();
      row.status = "stagnated";
      rep.failed = true;
    }
    const Field& f = rr.field;
    const EnergyReport er = assemble_energy(f);
    row.e_total = er.total;
    row.e_dirichlet = er.dirichlet;
    row.e_bulk = er.bulk;
    row.iterations = rr.iterations;
    row.residual = rr.residual;
    row.mass = eps < 1 ? er.total / std::log(1.0 / eps) : kNaN;
    eps_seen.push_back(eps);
    energy_seen.push_back(er.total);
    row.slope = eps_seen.size() >= 2 ? log_slope(eps_seen, energy_seen) : kNaN;

    const Vec3 center = c.density_centers.empty() ? Vec3{} : c.density_centers.front();
    row.theta = row.theta_slope = kNaN;
    if (f.domain.dim == 3 && eps < 0.5) {
      std::vector<double> radii = c.density_radii;
      if (radii.empty())
        for (double r = 4 * c.h; r <= 0.5 * inner_radius(f.domain, center) + 1e-12; r += 2 * c.h) radii.push_back(r);
      if (!radii.empty()) row.theta = density_estimate(rescaled_measure(f, c.h), center, radii).extrapolated;
      const double half = 0.5 * f.domain.extents[1];
      tube_seen.push_back(tube_energy_density(f, center, f.domain.extents[0], half));
      if (tube_seen.size() >= 2) row.theta_slope = log_slope(eps_seen, tube_seen);
    }

    row.lb_main = row.lb_measured = row.lb_margin = kNaN;
    if (f.domain.dim == 2) {
      const double r = c.lower_bound_radius > 0 ? c.lower_bound_radius : inner_radius(f.domain, center) - 2 * c.h;
      if (r > 0 && eps < r / 80.0 && c.domain != DomainKind::Annulus2d) {
        try {
          const SliceBound sb = slice_lower_bound(f, r, center);
          row.lb_main = sb.main_term;
          row.lb_measured = sb.measured;
          row.lb_margin = sb.margin;
        } catch (const Error&) {
          // Degenerate circle: the bound does not apply.
        }
      }
    }

    if (c.snapshots) write_snapshot((fs::path(c.output_dir) / ("field_" + std::to_string(k) + ".ldg")).string(), f);
    json jr = {{"eps", eps},           {"E_total", row.e_total}, {"E_dirichlet", row.e_dirichlet},
               {"E_bulk", row.e_bulk}, {"iterations", row.iterations}, {"residual", row.residual},
               {"status", row.status}};
    summary["rows"].push_back(jr);
    rep.rows.push_back(row);
  }

  std::ofstream os(rep.csv_path);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + rep.csv_path);
  os << sweep_csv_header() << '\n';
  for (const SweepRow& r : rep.rows) os << sweep_csv_row(r) << '\n';
  summary["failed"] = rep.failed;
  write_json((fs::path(c.output_dir) / "sweep.json").string(), summary);
  return rep;
}

}  // namespace ldg
