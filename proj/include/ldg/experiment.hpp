// Experiment configs and eps-sweeps.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ldg/io.hpp"
#include "ldg/relax.hpp"

namespace ldg {

struct ExperimentConfig {
  MaterialParams params = derive_params(6, 1, 1, 1);
  DomainKind domain = DomainKind::Disk2d;
  std::array<double, 3> extents{1, 0, 0};
  double h = 1.0 / 64;
  std::optional<ClassTag> boundary_class = ClassTag::H1;
  std::string loop_file;   // used when no class is given
  double separation = 0.5;  // core offset for two-core boundary data
  std::vector<double> eps{0.1, 0.05, 0.025};
  SolveConfig solver;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  double perturbation = 0;  // amplitude of seeded interior noise in the initial guess
  bool deterministic = true;
  bool snapshots = true;
  double mask_threshold = 0.5;
  std::vector<Vec3> density_centers{{0, 0, 0}};
  std::vector<double> density_radii;  // empty: automatic
  double lower_bound_radius = 0;  // 0: largest circle inside the domain
};

// Parses and validates; throws InvalidParameter on schema violations.
ExperimentConfig config_from_json(const json& j);
json to_json(const ExperimentConfig& c);
void validate(const ExperimentConfig& c);

// Boundary data and initial guess for one eps.
Field build_problem(const ExperimentConfig& c, double eps);

struct SweepRow {
  double eps = 0;
  double e_total = 0, e_dirichlet = 0, e_bulk = 0;
  double slope = 0;       // fitted dE/dlog(1/eps) over rows so far (NaN for the first)
  double mass = 0;        // E / log(1/eps)
  double theta = 0;       // extrapolated mu(B_r)/2r at the first density center
  double theta_slope = 0; // sweep estimate of the axis density (NaN for the first)
  double lb_main = 0, lb_measured = 0, lb_margin = 0;  // NaN when the slice bound does not apply
  std::size_t iterations = 0;
  double residual = 0;
  std::string status;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool failed = false;
  std::string csv_path;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& r);

RelaxResult run_relax(const ExperimentConfig& c, double eps);
SweepReport run_sweep(const ExperimentConfig& c);

}  // namespace ldg
