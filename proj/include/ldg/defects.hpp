// Defect extraction and certification on relaxed fields: phi0 masks,
// rescaled energy measures, density estimates, clearing-out, slice lower
// bounds and a junction balance check.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ldg/grid.hpp"
#include "ldg/q8.hpp"

namespace ldg {

struct DefectComponent {
  std::vector<std::size_t> nodes;
  Vec3 centroid;
  Vec3 lo, hi;  // bounding box of node positions
};

struct DefectMask {
  double threshold = 0.5;
  std::vector<std::uint8_t> flagged;  // per grid node
  std::vector<DefectComponent> components;
  std::size_t count() const;
};

// Interior nodes with phi0 < threshold, grouped by face adjacency.
DefectMask defect_mask(const Field& f, double threshold = 0.5);

// Per-cell mass E_eps(cell) / log(1/eps) on a coarse grid of cubes.
struct MeasureGrid {
  int dim = 2;
  double cell = 0;
  double log_scale = 1;  // log(1/eps)
  Vec3 origin;
  std::array<int, 3> n{1, 1, 1};
  std::vector<double> mass;
  std::vector<Vec3> centroid;  // mass-weighted node centroid per cell
  double energy_total = 0;     // E_eps(Omega) with the same quadrature

  double total() const;
  // Mass of cells whose centroid lies in the closed ball.
  double ball_mass(Vec3 x, double r) const;
  // Mass in the slab |z - x.z| <= half_height within distance radius of the
  // vertical line through x.
  double tube_mass(Vec3 x, double radius, double half_height) const;
};

MeasureGrid rescaled_measure(const Field& f, double cell);

struct DensityProfile {
  std::vector<double> radii, values;  // mu(B_r(x)) / 2r
  double extrapolated = 0;            // linear fit evaluated at r = 0
};

DensityProfile density_estimate(const MeasureGrid& m, Vec3 x, const std::vector<double>& radii);

// Least-squares slope of values against log(1/eps).
double log_slope(const std::vector<double>& eps, const std::vector<double>& values);

// Energy per unit length of the tube around the vertical line through x,
// restricted to |z - x.z| <= half_height.
double tube_energy_density(const Field& f, Vec3 x, double radius, double half_height);

struct ClearingOut {
  bool hypothesis_holds = false;
  double energy = 0;       // E(B_r)
  double threshold = 0;    // eta0 r log(r/eps)
  double half_ratio = 0;   // E(B_{r/2}) / r, meaningful when the hypothesis holds
  std::string verdict() const;
};

ClearingOut clearing_out(const Field& f, Vec3 x, double r, double eta0, double eps_bar = 0.25);

// Tensor loop on the circle of radius r around c, interpolated from a planar field.
std::vector<QTensor> circle_trace(const Field& f, Vec3 c, double r, std::size_t samples);

struct SliceBound {
  ClassTag tag = ClassTag::H0;
  double weight = 0;    // E* of the boundary class
  double phi0_min = 0;  // on the circle
  double main_term = 0;
  double energy_disk = 0;
  double energy_circle = 0;
  double measured = 0;  // energy_disk + 4 log 5 * energy_circle
  double margin = 0;    // measured - main_term
};

SliceBound slice_lower_bound(const Field& f2d, double r, Vec3 center = {});

// max(main - measured) over hedgehog slices at r/eps in {100, 200, 400}, plus 10%.
double calibrate_c_fit(const MaterialParams& p);

// C_fit for the default coefficients (6, 1, 1, 1), frozen from calibrate_c_fit.
constexpr double kDefaultCFit = 0.0;

struct JunctionArm {
  Vec3 direction;
  ClassTag tag = ClassTag::H0;
  double weight = 0;
};

struct JunctionReport {
  std::vector<JunctionArm> arms;
  Vec3 balance;  // sum of weight * direction
};

// Finds defect crossings on the sphere S_r(c) of a 3D field, classifies a
// small loop around each on the sphere and sums E* times direction.
JunctionReport junction_balance(const Field& f, Vec3 c, double r, double threshold = 0.5);

}  // namespace ldg
