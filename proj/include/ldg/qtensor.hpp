// Symmetric traceless 3x3 tensors in a fixed orthonormal 5-dimensional basis,
// their spectra, and the sextic bulk potential.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ldg {

enum class ErrorKind {
  InvalidParameter,
  UndefinedShape,
  ProjectionUndefined,
  Precondition,
  NotUnit,
  RefineLoop,
  LiftFailed,
  InconsistentClass,
  Stagnation,
  DomainError,
  CannotClassify,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  Vec3& operator+=(Vec3 b) {
    x += b.x;
    y += b.y;
    z += b.z;
    return *this;
  }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline Vec3 normalized(Vec3 a) { return (1.0 / norm(a)) * a; }

struct Mat3 {
  std::array<double, 9> a{};  // row-major
  double& operator()(int i, int j) { return a[3 * i + j]; }
  double operator()(int i, int j) const { return a[3 * i + j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
  static Mat3 outer(Vec3 u, Vec3 v) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = u[i] * v[j];
    return m;
  }
  static Mat3 diag(double d0, double d1, double d2) {
    Mat3 m;
    m(0, 0) = d0;
    m(1, 1) = d1;
    m(2, 2) = d2;
    return m;
  }
  Vec3 col(int j) const { return {a[j], a[3 + j], a[6 + j]}; }
  Vec3 row(int i) const { return {a[3 * i], a[3 * i + 1], a[3 * i + 2]}; }
  Mat3 transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }
  double trace() const { return a[0] + a[4] + a[8]; }
};

Mat3 operator+(const Mat3& x, const Mat3& y);
Mat3 operator-(const Mat3& x, const Mat3& y);
Mat3 operator*(double s, const Mat3& x);
Mat3 operator*(const Mat3& x, const Mat3& y);
Vec3 operator*(const Mat3& m, Vec3 v);
double frobenius_dot(const Mat3& x, const Mat3& y);
double frobenius_norm(const Mat3& x);

// Element of the space of symmetric traceless 3x3 matrices, stored by its
// coordinates in the basis
//   E1 = diag(1,-1,0)/sqrt2, E2 = diag(1,1,-2)/sqrt6,
//   E3 = (e1e2+e2e1)/sqrt2, E4 = (e1e3+e3e1)/sqrt2, E5 = (e2e3+e3e2)/sqrt2.
// The basis is orthonormal, so the Frobenius inner product is the Euclidean
// inner product of coefficient vectors.
struct QTensor {
  std::array<double, 5> c{};

  Mat3 matrix() const;
  // Orthogonal projection of an arbitrary matrix onto the symmetric traceless space.
  static QTensor from_matrix(const Mat3& m);

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }

  QTensor& operator+=(const QTensor& o) {
    for (int i = 0; i < 5; ++i) c[i] += o.c[i];
    return *this;
  }
  QTensor& operator-=(const QTensor& o) {
    for (int i = 0; i < 5; ++i) c[i] -= o.c[i];
    return *this;
  }
  QTensor& operator*=(double s) {
    for (double& v : c) v *= s;
    return *this;
  }
  bool operator==(const QTensor&) const = default;
};

inline QTensor operator+(QTensor a, const QTensor& b) { return a += b; }
inline QTensor operator-(QTensor a, const QTensor& b) { return a -= b; }
inline QTensor operator*(double s, QTensor a) { return a *= s; }
inline QTensor operator-(QTensor a) { return a *= -1.0; }
inline double dot(const QTensor& a, const QTensor& b) {
  double s = 0;
  for (int i = 0; i < 5; ++i) s += a.c[i] * b.c[i];
  return s;
}
inline double norm_sq(const QTensor& a) { return dot(a, a); }
inline double norm(const QTensor& a) { return std::sqrt(dot(a, a)); }

// tr(Q^2) and tr(Q^3) straight from the coefficients.
double trace_sq(const QTensor& q);
double trace_cube(const QTensor& q);

struct MaterialParams {
  double a2 = 0, a4 = 0, a6 = 0, a6p = 0;
  double r_star = 0;
  double a1 = 0;
  double kappa_star = 0;
};

MaterialParams derive_params(double a2, double a4, double a6, double a6p);

struct SpectralData {
  std::array<double, 3> lambda{};  // descending
  std::array<Vec3, 3> u{};         // orthonormal eigenvectors
};

SpectralData spectral(const QTensor& q);

struct ShapeParams {
  double s = 0;
  double r = 0;
};

ShapeParams shape_params(const QTensor& q);
ShapeParams shape_params(const SpectralData& sd);

double bulk_energy(const QTensor& q, const MaterialParams& p);
// Projected gradient of the bulk density (the Euler-Lagrange nonlinearity).
QTensor bulk_gradient(const QTensor& q, const MaterialParams& p);
// Both at once; grad may be null.
double bulk_energy_and_gradient(const QTensor& q, const MaterialParams& p, QTensor* grad);

struct WellsGap {
  double zeta = 0;
  double xi = 0;
};
WellsGap wells_gap(const QTensor& q, const MaterialParams& p);

// Q = r*(nn - mm) for orthonormal n, m.
QTensor vacuum_tensor(Vec3 n, Vec3 m, double r_star);
// Q = s0 (nn - I/3).
QTensor uniaxial(Vec3 n, double s0);

}  // namespace ldg
