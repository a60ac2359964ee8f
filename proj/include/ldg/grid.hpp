// Masked Cartesian grids, discretized fields, and the discrete energy.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ldg/parallel.hpp"
#include "ldg/qtensor.hpp"

namespace ldg {

enum class DomainKind { Square2d, Disk2d, Annulus2d, Box3d, Cylinder3d };

enum class NodeType : std::uint8_t { Exterior = 0, Interior = 1, Boundary = 2 };

const char* to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

struct Domain {
  DomainKind kind = DomainKind::Square2d;
  int dim = 2;
  double h = 0;
  // square: (side); disk: (R); annulus: (R_in, R_out); box: (ax, ay, az);
  // cylinder: (R, L) with half-length L.
  std::array<double, 3> extents{};
  std::array<int, 3> n{1, 1, 1};
  Vec3 origin;
  std::vector<NodeType> mask;

  std::size_t node_count() const { return mask.size(); }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
  }
  std::array<int, 3> ijk(std::size_t idx) const;
  Vec3 position(std::size_t idx) const;
  bool in_domain(std::size_t idx) const { return mask[idx] != NodeType::Exterior; }
  double cell_volume() const;
  double min_extent() const;
};

Domain make_square2d(double side, double h);
Domain make_disk2d(double radius, double h);
Domain make_annulus2d(double r_in, double r_out, double h);
Domain make_box3d(double ax, double ay, double az, double h);
Domain make_cylinder3d(double radius, double half_length, double h);
Domain make_domain(DomainKind kind, std::array<double, 3> extents, double h);

struct Field {
  Domain domain;
  std::vector<QTensor> values;  // one per grid node; exterior nodes unused
  double eps = 0.1;
  MaterialParams params;
};

Field make_field(Domain d, double eps, const MaterialParams& p);

struct EnergyReport {
  double total = 0, dirichlet = 0, bulk = 0;
  std::vector<double> density;  // per grid node, zero outside
  double max_abs_q = 0;
  double max_dist = 0;
};

EnergyReport assemble_energy(const Field& f, Reduction mode = Reduction::Deterministic);

// Derivative of the assembled energy with respect to nodal values; zero on
// boundary and exterior nodes.
std::vector<QTensor> energy_gradient(const Field& f, Reduction mode = Reduction::Deterministic);

// max over interior nodes of |-eps^2 Lap_h Q + Psi(Q)|.
double el_residual(const Field& f);

// Five-point / seven-point Laplacian at an interior node.
QTensor discrete_laplacian(const Field& f, std::size_t idx);
// Centered differences where both neighbors exist, one-sided otherwise.
std::array<QTensor, 3> nodal_gradient(const Field& f, std::size_t idx);

// Multilinear interpolation of nodal values; nullopt-like flag when a corner
// lies outside the domain.
bool interpolate(const Field& f, Vec3 x, QTensor* out);
bool interpolate_gradient(const Field& f, Vec3 x, std::array<QTensor, 3>* out);

double max_boundary_norm(const Field& f);
double max_norm(const Field& f);

}  // namespace ldg
