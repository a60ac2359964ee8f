#include "ldg/qtensor.hpp"

#include <algorithm>
#include <numbers>

namespace ldg {

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
const double kInvSqrt6 = 1.0 / std::sqrt(6.0);

}  // namespace

Mat3 operator+(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

Mat3 operator-(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

Mat3 operator*(double s, const Mat3& x) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = s * x.a[i];
  return r;
}

Mat3 operator*(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

Vec3 operator*(const Mat3& m, Vec3 v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
          m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
          m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

double frobenius_dot(const Mat3& x, const Mat3& y) {
  double s = 0;
  for (int i = 0; i < 9; ++i) s += x.a[i] * y.a[i];
  return s;
}

double frobenius_norm(const Mat3& x) { return std::sqrt(frobenius_dot(x, x)); }

Mat3 QTensor::matrix() const {
  const double d1 = c[0] * kInvSqrt2, d2 = c[1] * kInvSqrt6;
  Mat3 m;
  m(0, 0) = d1 + d2;
  m(1, 1) = -d1 + d2;
  m(2, 2) = -2.0 * d2;
  m(0, 1) = m(1, 0) = c[2] * kInvSqrt2;
  m(0, 2) = m(2, 0) = c[3] * kInvSqrt2;
  m(1, 2) = m(2, 1) = c[4] * kInvSqrt2;
  return m;
}

QTensor QTensor::from_matrix(const Mat3& m) {
  QTensor q;
  q.c[0] = (m(0, 0) - m(1, 1)) * kInvSqrt2;
  q.c[1] = (m(0, 0) + m(1, 1) - 2.0 * m(2, 2)) * kInvSqrt6;
  q.c[2] = (m(0, 1) + m(1, 0)) * kInvSqrt2;
  q.c[3] = (m(0, 2) + m(2, 0)) * kInvSqrt2;
  q.c[4] = (m(1, 2) + m(2, 1)) * kInvSqrt2;
  return q;
}

double trace_sq(const QTensor& q) { return norm_sq(q); }

double trace_cube(const QTensor& q) {
  // tr Q^3 = 3 det Q for traceless Q.
  const Mat3 m = q.matrix();
  const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                     m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  return 3.0 * det;
}

MaterialParams derive_params(double a2, double a4, double a6, double a6p) {
  if (!(a2 > 0) || !(a4 > 0) || !(a6 > 0) || !(a6p > 0))
    throw Error(ErrorKind::InvalidParameter, "bulk coefficients must be strictly positive");
  MaterialParams p{a2, a4, a6, a6p};
  // 4 a6 t^2 + 2 a4 t - a2 = 0 with t = r*^2; rationalized root avoids cancellation.
  const double t = a2 / (a4 + std::sqrt(a4 * a4 + 4.0 * a2 * a6));
  p.r_star = std::sqrt(t);
  p.a1 = a2 * t - a4 * t * t - (4.0 / 3.0) * a6 * t * t * t;
  p.kappa_star = std::numbers::pi * t / 2.0;
  return p;
}

namespace {

Vec3 null_vector(const Mat3& m) {
  // m is (Q - lambda I), numerically rank 2: the eigenvector is the largest
  // cross product of two of its rows.
  const Vec3 r0 = m.row(0), r1 = m.row(1), r2 = m.row(2);
  const Vec3 c[3] = {cross(r0, r1), cross(r0, r2), cross(r1, r2)};
  int best = 0;
  double bn = dot(c[0], c[0]);
  for (int k = 1; k < 3; ++k) {
    const double nk = dot(c[k], c[k]);
    if (nk > bn) {
      bn = nk;
      best = k;
    }
  }
  return (1.0 / std::sqrt(bn)) * c[best];
}

Vec3 canonical_sign(Vec3 v) {
  int imax = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  return v[imax] < 0 ? -1.0 * v : v;
}

// First fixed axis with a large residual after removing u, orthonormalized.
Vec3 complete_against(Vec3 u) {
  for (int k = 0; k < 3; ++k) {
    Vec3 e;
    e[k] = 1.0;
    const Vec3 w = e - dot(e, u) * u;
    if (dot(w, w) > 0.5) return normalized(w);
  }
  // unreachable: the three residuals sum to 2 in squared norm
  return {};
}

}  // namespace

SpectralData spectral(const QTensor& q) {
  SpectralData sd;
  const double t2 = trace_sq(q);
  const double qn = std::sqrt(t2);
  if (qn == 0.0) {
    sd.u = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    return sd;
  }
  const Mat3 m = q.matrix();
  const double det = trace_cube(q) / 3.0;

  // Traceless characteristic polynomial x^3 - (t2/2) x - det.
  const double pp = std::sqrt(t2 / 6.0);
  double rr = det / (2.0 * pp * pp * pp);
  rr = std::clamp(rr, -1.0, 1.0);
  const double phi = std::acos(rr) / 3.0;
  std::array<double, 3> lam = {2.0 * pp * std::cos(phi),
                               2.0 * pp * std::cos(phi + 2.0 * std::numbers::pi / 3.0),
                               2.0 * pp * std::cos(phi + 4.0 * std::numbers::pi / 3.0)};
  for (double& l : lam) {
    const double f = l * l * l - 0.5 * t2 * l - det;
    const double fp = 3.0 * l * l - 0.5 * t2;
    if (std::abs(fp) > 1e-8 * t2) l -= f / fp;
  }
  std::sort(lam.begin(), lam.end(), std::greater<>());

  // Deflate the better separated end of the spectrum; the remaining 2x2
  // block resolves a small gap to full absolute precision.
  auto shifted = [&](double l) { return m - l * Mat3::identity(); };
  const bool top_first = lam[0] - lam[1] >= lam[1] - lam[2];
  const Vec3 ui = canonical_sign(null_vector(shifted(top_first ? lam[0] : lam[2])));
  const Vec3 v = complete_against(ui), w = cross(ui, v);
  const double a = dot(v, m * v), b = dot(v, m * w), d = dot(w, m * w);
  const double mean = 0.5 * (a + d), rad = std::hypot(0.5 * (a - d), b);
  const double ang = 0.5 * std::atan2(2.0 * b, a - d);
  const Vec3 p_hi = std::cos(ang) * v + std::sin(ang) * w;
  const Vec3 p_lo = std::cos(ang) * w - std::sin(ang) * v;
  const double li = dot(ui, m * ui);
  if (top_first)
    lam = {li, mean + rad, mean - rad};
  else
    lam = {mean + rad, mean - rad, li};
  lam[1] = -lam[0] - lam[2];
  sd.lambda = lam;

  const double tol = 1e-9 * (1.0 + qn);
  const bool top_iso = lam[0] - lam[1] > tol;
  const bool bot_iso = lam[1] - lam[2] > tol;

  Vec3 u0, u1, u2;
  if (top_iso && bot_iso) {
    u0 = canonical_sign(top_first ? ui : p_hi);
    u2 = canonical_sign(top_first ? p_lo : ui);
    u1 = canonical_sign(cross(u2, u0));
  } else if (top_iso) {
    u0 = ui;
    u1 = complete_against(u0);
    u2 = cross(u0, u1);
  } else if (bot_iso) {
    u2 = ui;
    u0 = complete_against(u2);
    u1 = cross(u2, u0);
  } else {
    u0 = {1, 0, 0};
    u1 = {0, 1, 0};
    u2 = {0, 0, 1};
  }
  sd.u = {u0, u1, u2};
  return sd;
}

ShapeParams shape_params(const SpectralData& sd) {
  const double s = sd.lambda[0] - sd.lambda[2];  // = 2 l1 + l2
  if (!(s > 0)) throw Error(ErrorKind::UndefinedShape, "shape parameters undefined at Q = 0");
  ShapeParams sp;
  sp.s = s;
  sp.r = std::clamp((sd.lambda[1] - sd.lambda[2]) / s, 0.0, 1.0);  // s r = l1 + 2 l2
  return sp;
}

ShapeParams shape_params(const QTensor& q) {
  if (norm_sq(q) == 0.0)
    throw Error(ErrorKind::UndefinedShape, "shape parameters undefined at Q = 0");
  return shape_params(spectral(q));
}

double bulk_energy(const QTensor& q, const MaterialParams& p) {
  const double t2 = trace_sq(q), t3 = trace_cube(q);
  return p.a1 - 0.5 * p.a2 * t2 + 0.25 * p.a4 * t2 * t2 + (p.a6 / 6.0) * t2 * t2 * t2 +
         (p.a6p / 6.0) * t3 * t3;
}

QTensor bulk_gradient(const QTensor& q, const MaterialParams& p) {
  const double t2 = trace_sq(q), t3 = trace_cube(q);
  const double scal = -p.a2 + p.a4 * t2 + p.a6 * t2 * t2;
  QTensor g = scal * q;
  if (t3 != 0.0) {
    const Mat3 m = q.matrix();
    // from_matrix removes the trace, which is exactly the -(1/3) tr Q^2 I term.
    g += (p.a6p * t3) * QTensor::from_matrix(m * m);
  }
  return g;
}

double bulk_energy_and_gradient(const QTensor& q, const MaterialParams& p, QTensor* grad) {
  const Mat3 m = q.matrix();
  const double t2 = trace_sq(q);
  const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                     m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  const double t3 = 3.0 * det;
  if (grad) {
    *grad = (-p.a2 + p.a4 * t2 + p.a6 * t2 * t2) * q;
    if (t3 != 0.0) *grad += (p.a6p * t3) * QTensor::from_matrix(m * m);
  }
  return p.a1 - 0.5 * p.a2 * t2 + 0.25 * p.a4 * t2 * t2 + (p.a6 / 6.0) * t2 * t2 * t2 +
         (p.a6p / 6.0) * t3 * t3;
}

WellsGap wells_gap(const QTensor& q, const MaterialParams& p) {
  const Mat3 m = q.matrix();
  const Mat3 d = m * m * m - (p.r_star * p.r_star) * m;
  const double x = trace_sq(q) - 2.0 * p.r_star * p.r_star;
  return {frobenius_dot(d, d), x * x};
}

QTensor vacuum_tensor(Vec3 n, Vec3 m, double r_star) {
  return QTensor::from_matrix(r_star * (Mat3::outer(n, n) - Mat3::outer(m, m)));
}

QTensor uniaxial(Vec3 n, double s0) {
  return QTensor::from_matrix(s0 * (Mat3::outer(n, n) - (1.0 / 3.0) * Mat3::identity()));
}

}  // namespace ldg
