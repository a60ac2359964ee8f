// Boundary data and initial guesses: truncated hedgehogs, two-core ansatz
// fields, and cylinder data built from boundary loops.
#pragma once

#include <functional>
#include <vector>

#include "ldg/grid.hpp"
#include "ldg/q8.hpp"

namespace ldg {

using TensorFn = std::function<QTensor(Vec3)>;

// Linear core profile: rho/eps below eps, 1 beyond.
double eta(double rho, double eps);

enum class FillTarget { All, Boundary, Interior };
void fill(Field& f, const TensorFn& fn, FillTarget target = FillTarget::All);

// eta_eps(|x_perp|) * P(arg x_perp), the radial transport of a loop through
// the axis with a linear core.
TensorFn radial_extension(const LoopFn& loop, double eps);

// Truncated hedgehog on the disk of radius r; throws for H0.
Field hedgehog_2d(ClassTag tag, double eps, double r, double h, const MaterialParams& p);

// A planar map with up to two point cores. Core 0 sits at (+d, 0) with its
// angular cut along +x, core 1 at (-d, 0) with its cut along -x; each winds
// the frame by a half turn about its axis. With one core it sits at the origin.
struct CoreAnsatz {
  std::vector<Vec3> axes;
  double separation = 0.5;  // d
  MaterialParams params;

  Quat frame(Vec3 x) const;
  // With eps > 0 the amplitude carries the product of eta profiles.
  QTensor tensor(Vec3 x, double eps) const;
  LoopFn trace(double radius) const;
};

CoreAnsatz core_ansatz(ClassTag tag, double separation, const MaterialParams& p);

// Smooth contractible data with A-type winding psi = (pi/4)(rho/R) sin theta.
TensorFn wiggle_extension(double radius, const MaterialParams& p);

// Disk problem with boundary data in the given class: H0 uses the wiggle
// loop, H1 and H2 a single core, H3 and H4 the two-core ansatz.
Field disk_problem(ClassTag tag, double radius, double eps, double h, const MaterialParams& p,
                   double separation = 0.5);

// Lateral data P(theta) on the cylinder wall; caps default to the hedgehog
// eta_eps(rho) P(theta). The interior starts from the same z-independent
// radial transport.
Field cylinder_boundary(const LoopFn& loop, double radius, double half_length, double eps, double h,
                        const MaterialParams& p, const TensorFn& cap = nullptr);

// Annulus with the same loop on both circles (defect-free when the loop is
// a geodesic winding once), interior initialized by the loop itself.
Field annulus_problem(const LoopFn& loop, double r_in, double r_out, double eps, double h,
                      const MaterialParams& p);

}  // namespace ldg
