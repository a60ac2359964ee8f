#include "ldg/manifold.hpp"

#include <numbers>

namespace ldg {

double degenerate_tolerance(const QTensor& q, const MaterialParams& p) {
  return 1e-8 * (1.0 + norm(q) / p.r_star);
}

ManifoldPoint manifold_point(Vec3 n, Vec3 m, const MaterialParams& p) {
  return {vacuum_tensor(n, m, p.r_star), n, m};
}

ManifoldPoint project(const QTensor& q, const MaterialParams& p) {
  const SpectralData sd = spectral(q);
  const Biaxiality b = biaxiality(sd, 0.25, p);
  if (!(b.phi0 > degenerate_tolerance(q, p)))
    throw Error(ErrorKind::ProjectionUndefined,
                "projection onto the vacuum manifold undefined: degenerate spectrum");
  return manifold_point(sd.u[0], sd.u[2], p);
}

double dist_to_manifold(const QTensor& q, const MaterialParams& p) {
  const SpectralData sd = spectral(q);
  const double a = sd.lambda[0] - p.r_star, b = sd.lambda[1], c = sd.lambda[2] + p.r_star;
  return std::sqrt(a * a + b * b + c * c);
}

double beta_tau(double r, double tau) {
  const double x = (2.0 * r - 1.0) / 2.0;
  const double x2 = x * x;
  return x2 * x2 * x2 / (24.0 * std::pow(tau, 5)) - 5.0 * x2 / (8.0 * tau) +
         (6.0 - 5.0 * tau) / 12.0;
}

double phi_tau_hat(const ShapeParams& sp, double tau) {
  if (sp.r < (1.0 - 2.0 * tau) / 2.0) return sp.s * sp.r;
  if (sp.r > (1.0 + 2.0 * tau) / 2.0) return sp.s * (1.0 - sp.r);
  return sp.s * beta_tau(sp.r, tau);
}

Biaxiality biaxiality(const SpectralData& sd, double tau, const MaterialParams& p) {
  Biaxiality b;
  b.phi1 = (sd.lambda[0] - sd.lambda[1]) / p.r_star;
  b.phi2 = (sd.lambda[1] - sd.lambda[2]) / p.r_star;
  b.phi0 = std::min(b.phi1, b.phi2);
  if (sd.lambda[0] - sd.lambda[2] > 0) b.phi_tau = phi_tau_hat(shape_params(sd), tau) / p.r_star;
  return b;
}

Biaxiality biaxiality(const QTensor& q, double tau, const MaterialParams& p) {
  return biaxiality(spectral(q), tau, p);
}

QTensor sigma_tau(const QTensor& q, double tau, const MaterialParams& p) {
  const SpectralData sd = spectral(q);
  const Biaxiality b = biaxiality(sd, tau, p);
  if (!(b.phi0 > 0)) return {};
  return b.phi_tau * vacuum_tensor(sd.u[0], sd.u[2], p.r_star);
}

std::array<QTensor, 2> normal_frame(const ManifoldPoint& base, const MaterialParams& p) {
  const double rs = p.r_star, rs2 = rs * rs;
  const Mat3 qm = base.q.matrix();
  const Mat3 sq = qm * qm - (2.0 * rs2 / 3.0) * Mat3::identity();
  const QTensor n1 = (1.0 / (std::numbers::sqrt2 * rs)) * base.q;
  const QTensor n2 = (std::sqrt(6.0) / (2.0 * rs2)) * QTensor::from_matrix(sq);
  return {n1, n2};
}

TangentSplit tangent_split(const ManifoldPoint& base, const QTensor& P, const MaterialParams& p) {
  const auto nf = normal_frame(base, p);
  TangentSplit ts;
  ts.mu1 = dot(P, nf[0]);
  ts.mu2 = dot(P, nf[1]);
  ts.normal = ts.mu1 * nf[0] + ts.mu2 * nf[1];
  ts.tangential = P - ts.normal;
  return ts;
}

namespace {

bool is_tangential(const ManifoldPoint& base, const QTensor& X, const MaterialParams& p,
                   double tol) {
  const auto nf = normal_frame(base, p);
  const double scale = 1.0 + norm(X);
  return std::abs(dot(X, nf[0])) <= tol * scale && std::abs(dot(X, nf[1])) <= tol * scale;
}

QTensor sff_unchecked(const ManifoldPoint& base, const Mat3& x, const Mat3& y,
                      const MaterialParams& p) {
  const double rs2 = p.r_star * p.r_star;
  const Mat3 qm = base.q.matrix();
  const Mat3 xy = x * y;
  const double t_xy = xy.trace();
  const double t_xyq = (xy * qm).trace();
  const Mat3 sq = qm * qm - (2.0 * rs2 / 3.0) * Mat3::identity();
  return QTensor::from_matrix((-t_xy / (2.0 * rs2)) * qm - (3.0 * t_xyq / (rs2 * rs2)) * sq);
}

}  // namespace

QTensor second_fundamental_form(const ManifoldPoint& base, const QTensor& X, const QTensor& Y,
                                const MaterialParams& p) {
  if (!is_tangential(base, X, p, 1e-8) || !is_tangential(base, Y, p, 1e-8))
    throw Error(ErrorKind::Precondition, "second fundamental form needs tangent vectors");
  return sff_unchecked(base, X.matrix(), Y.matrix(), p);
}

QTensor harmonic_tension(const ManifoldPoint& base, const std::array<QTensor, 3>& grad,
                         const MaterialParams& p) {
  QTensor out;
  for (const QTensor& g : grad) {
    if (norm_sq(g) == 0.0) continue;
    if (!is_tangential(base, g, p, 1e-6))
      throw Error(ErrorKind::Precondition, "tension needs tangential gradient components");
    const Mat3 gm = g.matrix();
    out += sff_unchecked(base, gm, gm, p);
  }
  return out;
}

}  // namespace ldg
