// Loops on the vacuum manifold: the 8-fold covering by unit quaternions,
// lifting, deck elements in the quaternion group, and free homotopy classes.
#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ldg/manifold.hpp"

namespace ldg {

struct Quat {
  double w = 1, x = 0, y = 0, z = 0;

  Quat conj() const { return {w, -x, -y, -z}; }
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quat operator-() const { return {-w, -x, -y, -z}; }
};

Quat operator*(const Quat& a, const Quat& b);
double quat_dist(const Quat& a, const Quat& b);
Quat axis_angle(Vec3 axis, double angle);
Mat3 rotation_matrix(const Quat& q);
// Unit quaternion of a proper rotation matrix.
Quat quat_from_rotation(const Mat3& r);

enum class Q8 { One, MinusOne, I, MinusI, J, MinusJ, K, MinusK };

Quat to_quat(Q8 g);
const std::array<Q8, 8>& q8_elements();
std::string to_string(Q8 g);
Q8 q8_mul(Q8 a, Q8 b);
Q8 q8_inverse(Q8 g);
// Nearest group element; residual receives the quaternion distance to it.
Q8 round_q8(const Quat& q, double* residual = nullptr);

enum class ClassTag { H0, H1, H2, H3, H4 };

std::string to_string(ClassTag t);
ClassTag class_of(Q8 g);

struct HPair {
  int top = 0;     // Z2 class of the top-eigenvector loop
  int bottom = 0;  // Z2 class of the bottom-eigenvector loop
  bool operator==(const HPair&) const = default;
};

HPair expected_hpair(ClassTag t);

struct HomotopyClass {
  ClassTag tag = ClassTag::H0;
  Q8 deck = Q8::One;
  HPair hpair;
};

struct NLoop {
  std::vector<ManifoldPoint> samples;
  double mesh = 0;  // largest chord, including the closing one

  std::size_t size() const { return samples.size(); }
};

using LoopFn = std::function<ManifoldPoint(double)>;

double loop_mesh(const std::vector<ManifoldPoint>& samples);
NLoop make_loop(std::vector<ManifoldPoint> samples);
// Projects each tensor onto N first.
NLoop make_loop(const std::vector<QTensor>& tensors, const MaterialParams& p);
NLoop sample_loop(const LoopFn& f, std::size_t n);

struct QuatPath {
  std::vector<Quat> q;
  Q8 deck = Q8::One;
};

ManifoldPoint cover_project(const Quat& q, const MaterialParams& p);
Quat frame_quat(Vec3 n, Vec3 m);

// fiber_start picks which of the 8 preimages of the first sample is used.
QuatPath lift_loop(const NLoop& loop, const MaterialParams& p, int fiber_start = 0);
int z2_class(const std::vector<Vec3>& directions);
HomotopyClass classify(const NLoop& loop, const MaterialParams& p);

double loop_energy(const NLoop& loop);
double loop_energy(const std::vector<QTensor>& samples);

NLoop swap_loop(const NLoop& loop);
NLoop reverse_loop(const NLoop& loop);
NLoop shift_loop(const NLoop& loop, std::size_t k);
NLoop rotate_loop(const NLoop& loop, const Mat3& r);

struct ClassEnergy {
  double e_lower = 0;  // E itself when exact, else open-interval endpoints
  double e_upper = 0;
  double e_star = 0;
  bool exact = true;
};

std::array<ClassEnergy, 5> class_energies(const MaterialParams& p);
double e_star(ClassTag t, const MaterialParams& p);

// Explicit geodesic representatives, parametrized over [0, 2pi].
LoopFn loop_a0(const MaterialParams& p);
LoopFn loop_b0(const MaterialParams& p);
LoopFn loop_l2(const MaterialParams& p);
LoopFn loop_l3(const MaterialParams& p);
LoopFn loop_constant(const MaterialParams& p);
// Contractible but nonconstant loop.
LoopFn loop_wiggle(const MaterialParams& p);
// f on the first half-turn, g on the second; both must share the base point.
LoopFn concat(LoopFn f, LoopFn g);
LoopFn representative(ClassTag t, const MaterialParams& p);

// Projected gradient descent of the discrete loop energy inside N.
NLoop relax_loop(const NLoop& loop, const MaterialParams& p, std::size_t iterations, double step);

}  // namespace ldg
