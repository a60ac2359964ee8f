// Compact neighbor tables shared by the energy assembly and the solver.
#pragma once

#include <cstdint>
#include <vector>

#include "ldg/grid.hpp"

namespace ldg::detail {

struct Stencil {
  int dim = 2;
  int width = 4;  // 2 * dim neighbor slots per node
  double h = 0;
  std::vector<std::size_t> grid_index;  // compact -> grid
  std::vector<std::int32_t> nbr;        // width slots per node, -1 if absent
  std::vector<std::uint8_t> interior;
  std::size_t size() const { return grid_index.size(); }
};

Stencil build_stencil(const Domain& d);

// Energy of the compact state x (5 doubles per node). When grad is given it
// receives the derivative with respect to x, zero at boundary nodes.
double energy_and_gradient(const Stencil& st, const double* x, double eps, const MaterialParams& p,
                           double* grad, Reduction mode);

}  // namespace ldg::detail
