// Shared helpers for the unit tests.
#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "ldg/manifold.hpp"
#include "ldg/q8.hpp"

namespace ldg::test {

inline const MaterialParams& default_params() {
  static const MaterialParams p = derive_params(6, 1, 1, 1);
  return p;
}

inline QTensor random_tensor(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  QTensor q;
  for (double& c : q.c) c = scale * g(rng);
  return q;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v{g(rng), g(rng), g(rng)};
  return normalized(v);
}

inline Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Quat q{g(rng), g(rng), g(rng), g(rng)};
  const double n = q.norm();
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

inline Mat3 random_rotation(std::mt19937_64& rng) { return rotation_matrix(random_quat(rng)); }

// Orthonormal pair (n, m).
inline std::pair<Vec3, Vec3> random_frame(std::mt19937_64& rng) {
  const Mat3 r = random_rotation(rng);
  return {r.col(0), r.col(1)};
}

inline ManifoldPoint random_point(std::mt19937_64& rng, const MaterialParams& p) {
  auto [n, m] = random_frame(rng);
  return manifold_point(n, m, p);
}

inline QTensor rotate(const QTensor& q, const Mat3& r) {
  return QTensor::from_matrix(r * q.matrix() * r.transposed());
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace ldg::test

#include <string>
#include <vector>

namespace ldg::test {

struct LabeledLoop {
  std::string name;
  NLoop loop;
  ClassTag expected;
};

// Representatives, swaps, a concatenation, a reversal and rigid rotations.
inline std::vector<LabeledLoop> regression_loops(const MaterialParams& p, std::size_t n = 512) {
  const Mat3 rot = rotation_matrix(axis_angle(normalized(Vec3{1, 2, -1}), 0.9));
  const NLoop a0 = sample_loop(loop_a0(p), n), b0 = sample_loop(loop_b0(p), n);
  const NLoop l2 = sample_loop(loop_l2(p), n), l3 = sample_loop(loop_l3(p), n);
  return {
      {"constant", sample_loop(loop_constant(p), n), ClassTag::H0},
      {"wiggle", sample_loop(loop_wiggle(p), n), ClassTag::H0},
      {"A0", a0, ClassTag::H1},
      {"B0", b0, ClassTag::H2},
      {"L2", l2, ClassTag::H3},
      {"L3", l3, ClassTag::H4},
      {"swap A0", swap_loop(a0), ClassTag::H2},
      {"swap B0", swap_loop(b0), ClassTag::H1},
      {"swap L2", swap_loop(l2), ClassTag::H3},
      {"A0 then B0", sample_loop(concat(loop_a0(p), loop_b0(p)), 2 * n), ClassTag::H3},
      {"reversed A0", reverse_loop(a0), ClassTag::H1},
      {"rotated L3", rotate_loop(l3, rot), ClassTag::H4},
  };
}

}  // namespace ldg::test
