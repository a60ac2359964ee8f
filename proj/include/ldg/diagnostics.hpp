// PDE-identity diagnostics on relaxed fields: monotonicity of scaled ball
// energies, the Pohozaev balance on balls, the discrete divergence of the
// stress-energy tensor, and distance to the vacuum manifold.
#pragma once

#include <functional>
#include <vector>

#include "ldg/grid.hpp"

namespace ldg {

// Per-node energy densities split into gradient and bulk parts.
struct DensitySplit {
  std::vector<double> dirichlet;
  std::vector<double> bulk;
};
DensitySplit density_split(const Field& f);

// Energy in B_rho(c) with a linear partial-volume weight over one cell.
double ball_energy(const Field& f, const std::vector<double>& density, Vec3 c, double rho);

// For planar fields: energy in the 3D ball of the z-invariant extension,
// sum of e_i h^2 * 2 sqrt(rho^2 - |x_i - c|^2).
double lifted_ball_energy(const Field& f, const std::vector<double>& density, Vec3 c, double rho);

// rho -> E(B_rho)/rho, lifted for planar fields.
std::vector<double> monotonicity_profile(const Field& f, const std::vector<double>& density, Vec3 c,
                                         const std::vector<double>& radii);

struct MonotonicityCheck {
  Vec3 center;
  std::vector<double> radii, values;
  double worst_drop = 0;
  bool monotone = true;
};

struct PohozaevCheck {
  Vec3 center;
  double radius = 0;
  double lhs = 0, rhs = 0;
  double defect = 0;  // |lhs - rhs| / total energy
};

PohozaevCheck pohozaev(const Field& f, const DensitySplit& ds, double total, Vec3 c, double rho,
                       int samples = 0);

struct DiagnosticsOptions {
  std::vector<Vec3> centers;
  std::vector<double> radii;  // empty: automatic ladder per center
  std::vector<std::pair<Vec3, double>> pohozaev_balls;
  // Nodes used for the sup-norm diagnostics; default interior nodes two
  // cells deep with phi0 >= 0.5.
  std::function<bool(const Field&, std::size_t)> compact;
  double tol_mono_factor = 5.0;
};

struct Diagnostics {
  double total_energy = 0;
  double tol_mono = 0;
  std::vector<MonotonicityCheck> monotonicity;
  std::vector<PohozaevCheck> pohozaev;
  double stress_divergence = 0;
  double dist_sup = 0;
  double el_remainder = 0;
};

Diagnostics diagnostics(const Field& f, const DiagnosticsOptions& opt);

bool default_compact(const Field& f, std::size_t idx);

// Harmonic-map remainder Lap_h Q - tension at rho(Q), per node.
QTensor el_remainder_at(const Field& f, std::size_t idx);

// Largest ball around c that stays inside the domain.
double inner_radius(const Domain& d, Vec3 c);

}  // namespace ldg
