// Geometry of the vacuum manifold N = { r*(nn - mm) : n, m orthonormal }.
#pragma once

#include <array>

#include "ldg/qtensor.hpp"

namespace ldg {

struct ManifoldPoint {
  QTensor q;
  Vec3 n;  // eigenvector for +r*
  Vec3 m;  // eigenvector for -r*
};

struct TangentSplit {
  QTensor tangential;
  QTensor normal;
  double mu1 = 0;  // coordinate along Q*/(sqrt2 r*)
  double mu2 = 0;  // coordinate along sqrt6 (Q*^2 - 2r*^2/3 I)/(2 r*^2)
};

struct Biaxiality {
  double phi1 = 0, phi2 = 0, phi0 = 0, phi_tau = 0;
};

double degenerate_tolerance(const QTensor& q, const MaterialParams& p);

// Nearest point of N, r*(u1u1 - u3u3). Throws ProjectionUndefined near the
// uniaxial cones where the top or bottom eigenvalue is not simple.
ManifoldPoint project(const QTensor& q, const MaterialParams& p);
ManifoldPoint manifold_point(Vec3 n, Vec3 m, const MaterialParams& p);

double dist_to_manifold(const QTensor& q, const MaterialParams& p);

// Smoothed blend of the two eigenvalue gaps, as a function of the shape ratio.
double beta_tau(double r, double tau);
double phi_tau_hat(const ShapeParams& sp, double tau);

Biaxiality biaxiality(const QTensor& q, double tau, const MaterialParams& p);
Biaxiality biaxiality(const SpectralData& sd, double tau, const MaterialParams& p);

QTensor sigma_tau(const QTensor& q, double tau, const MaterialParams& p);

// The two unit normals of N at base.
std::array<QTensor, 2> normal_frame(const ManifoldPoint& base, const MaterialParams& p);

TangentSplit tangent_split(const ManifoldPoint& base, const QTensor& P, const MaterialParams& p);

QTensor second_fundamental_form(const ManifoldPoint& base, const QTensor& X, const QTensor& Y,
                                const MaterialParams& p);

// Sum of the second fundamental form over the gradient components.
QTensor harmonic_tension(const ManifoldPoint& base, const std::array<QTensor, 3>& grad,
                         const MaterialParams& p);

}  // namespace ldg
