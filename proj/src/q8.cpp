#include "ldg/q8.hpp"

#include <algorithm>
#include <numbers>

namespace ldg {

Quat operator*(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

double quat_dist(const Quat& a, const Quat& b) {
  const double dw = a.w - b.w, dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
}

Quat axis_angle(Vec3 axis, double angle) {
  const Vec3 u = normalized(axis);
  const double s = std::sin(angle / 2.0);
  return {std::cos(angle / 2.0), s * u.x, s * u.y, s * u.z};
}

Mat3 rotation_matrix(const Quat& q) {
  const double a = q.w, b = q.x, c = q.y, d = q.z;
  Mat3 r;
  r(0, 0) = a * a + b * b - c * c - d * d;
  r(1, 0) = 2.0 * (b * c + a * d);
  r(2, 0) = 2.0 * (b * d - a * c);
  r(0, 1) = 2.0 * (b * c - a * d);
  r(1, 1) = a * a - b * b + c * c - d * d;
  r(2, 1) = 2.0 * (a * b + c * d);
  r(0, 2) = 2.0 * (b * d + a * c);
  r(1, 2) = 2.0 * (c * d - a * b);
  r(2, 2) = a * a - b * b - c * c + d * d;
  return r;
}

Quat quat_from_rotation(const Mat3& r) {
  // Shepperd: branch on the largest of the four squared components.
  const double t = r.trace();
  const double cand[4] = {t, r(0, 0), r(1, 1), r(2, 2)};
  const int k = static_cast<int>(std::max_element(cand, cand + 4) - cand);
  Quat q;
  if (k == 0) {
    const double s = 2.0 * std::sqrt(1.0 + t);
    q = {s / 4.0, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
  } else if (k == 1) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q = {(r(2, 1) - r(1, 2)) / s, s / 4.0, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
  } else if (k == 2) {
    const double s = 2.0 * std::sqrt(1.0 - r(0, 0) + r(1, 1) - r(2, 2));
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, s / 4.0, (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 - r(0, 0) - r(1, 1) + r(2, 2));
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, s / 4.0};
  }
  const double n = q.norm();
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

Quat to_quat(Q8 g) {
  switch (g) {
    case Q8::One: return {1, 0, 0, 0};
    case Q8::MinusOne: return {-1, 0, 0, 0};
    case Q8::I: return {0, 1, 0, 0};
    case Q8::MinusI: return {0, -1, 0, 0};
    case Q8::J: return {0, 0, 1, 0};
    case Q8::MinusJ: return {0, 0, -1, 0};
    case Q8::K: return {0, 0, 0, 1};
    case Q8::MinusK: return {0, 0, 0, -1};
  }
  return {};
}

const std::array<Q8, 8>& q8_elements() {
  static const std::array<Q8, 8> all = {Q8::One, Q8::MinusOne, Q8::I, Q8::MinusI,
                                        Q8::J,   Q8::MinusJ,   Q8::K, Q8::MinusK};
  return all;
}

std::string to_string(Q8 g) {
  static const char* names[] = {"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
  return names[static_cast<int>(g)];
}

Q8 round_q8(const Quat& q, double* residual) {
  Q8 best = Q8::One;
  double bd = 1e300;
  for (Q8 g : q8_elements()) {
    const double d = quat_dist(q, to_quat(g));
    if (d < bd) {
      bd = d;
      best = g;
    }
  }
  if (residual) *residual = bd;
  return best;
}

Q8 q8_mul(Q8 a, Q8 b) { return round_q8(to_quat(a) * to_quat(b)); }
Q8 q8_inverse(Q8 g) { return round_q8(to_quat(g).conj()); }

std::string to_string(ClassTag t) {
  static const char* names[] = {"H0", "H1", "H2", "H3", "H4"};
  return names[static_cast<int>(t)];
}

ClassTag class_of(Q8 g) {
  switch (g) {
    case Q8::One: return ClassTag::H0;
    case Q8::I:
    case Q8::MinusI: return ClassTag::H1;
    case Q8::J:
    case Q8::MinusJ: return ClassTag::H2;
    case Q8::K:
    case Q8::MinusK: return ClassTag::H3;
    case Q8::MinusOne: return ClassTag::H4;
  }
  return ClassTag::H0;
}

HPair expected_hpair(ClassTag t) {
  switch (t) {
    case ClassTag::H1: return {0, 1};
    case ClassTag::H2: return {1, 0};
    case ClassTag::H3: return {1, 1};
    default: return {0, 0};
  }
}

double loop_mesh(const std::vector<ManifoldPoint>& samples) {
  double mesh = 0;
  const std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i)
    mesh = std::max(mesh, norm(samples[(i + 1) % n].q - samples[i].q));
  return mesh;
}

NLoop make_loop(std::vector<ManifoldPoint> samples) {
  NLoop l;
  l.mesh = loop_mesh(samples);
  l.samples = std::move(samples);
  return l;
}

NLoop make_loop(const std::vector<QTensor>& tensors, const MaterialParams& p) {
  std::vector<ManifoldPoint> s;
  s.reserve(tensors.size());
  for (const QTensor& q : tensors) s.push_back(project(q, p));
  return make_loop(std::move(s));
}

NLoop sample_loop(const LoopFn& f, std::size_t n) {
  std::vector<ManifoldPoint> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = f(2.0 * std::numbers::pi * double(i) / double(n));
  return make_loop(std::move(s));
}

ManifoldPoint cover_project(const Quat& q, const MaterialParams& p) {
  const double n = q.norm();
  if (std::abs(n - 1.0) > 1e-6) throw Error(ErrorKind::NotUnit, "covering map needs a unit quaternion");
  const Quat u = {q.w / n, q.x / n, q.y / n, q.z / n};
  const Mat3 r = rotation_matrix(u);
  return manifold_point(r.col(0), r.col(1), p);
}

Quat frame_quat(Vec3 n, Vec3 m) {
  const Vec3 l = cross(n, m);
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    r(i, 0) = n[i];
    r(i, 1) = m[i];
    r(i, 2) = l[i];
  }
  return quat_from_rotation(r);
}

namespace {

struct FiberPick {
  Quat q;
  double best = 0, second = 0;
};

// Among the right translates base*g, the one closest to prev.
FiberPick closest_in_fiber(const Quat& base, const Quat& prev) {
  FiberPick pick;
  pick.best = pick.second = 1e300;
  for (Q8 g : q8_elements()) {
    const Quat c = base * to_quat(g);
    const double d = quat_dist(c, prev);
    if (d < pick.best) {
      pick.second = pick.best;
      pick.best = d;
      pick.q = c;
    } else if (d < pick.second) {
      pick.second = d;
    }
  }
  return pick;
}

}  // namespace

QuatPath lift_loop(const NLoop& loop, const MaterialParams& p, int fiber_start) {
  const std::size_t n = loop.size();
  if (n < 16) throw Error(ErrorKind::RefineLoop, "loop needs at least 16 samples");
  if (!(loop.mesh < p.r_star / 4.0))
    throw Error(ErrorKind::RefineLoop, "loop mesh too coarse for lifting");
  QuatPath path;
  path.q.resize(n);
  const Quat start = frame_quat(loop.samples[0].n, loop.samples[0].m) *
                     to_quat(q8_elements()[static_cast<std::size_t>(fiber_start) % 8]);
  path.q[0] = start;
  auto step = [&](std::size_t i, const Quat& prev) {
    const Quat base = frame_quat(loop.samples[i].n, loop.samples[i].m);
    const FiberPick pick = closest_in_fiber(base, prev);
    if (pick.second - pick.best <= 0.1 * pick.second)
      throw Error(ErrorKind::RefineLoop, "ambiguous lifting step; refine the loop");
    return pick.q;
  };
  for (std::size_t i = 1; i < n; ++i) path.q[i] = step(i, path.q[i - 1]);
  const Quat end = step(0, path.q[n - 1]);
  double residual = 0;
  path.deck = round_q8(start.conj() * end, &residual);
  if (residual > 0.2) throw Error(ErrorKind::LiftFailed, "deck element rounding residual too large");
  return path;
}

int z2_class(const std::vector<Vec3>& dirs) {
  if (dirs.empty()) return 0;
  Vec3 v = dirs[0];
  for (std::size_t i = 1; i < dirs.size(); ++i) v = dot(dirs[i], v) >= 0 ? dirs[i] : -1.0 * dirs[i];
  return dot(v, dirs[0]) >= 0 ? 0 : 1;
}

HomotopyClass classify(const NLoop& loop, const MaterialParams& p) {
  const QuatPath path = lift_loop(loop, p);
  HomotopyClass hc;
  hc.deck = path.deck;
  hc.tag = class_of(path.deck);
  std::vector<Vec3> top, bottom;
  top.reserve(loop.size());
  bottom.reserve(loop.size());
  for (const ManifoldPoint& s : loop.samples) {
    top.push_back(s.n);
    bottom.push_back(s.m);
  }
  hc.hpair = {z2_class(top), z2_class(bottom)};
  if (!(hc.hpair == expected_hpair(hc.tag)))
    throw Error(ErrorKind::InconsistentClass,
                "eigenvector loop classes disagree with the deck element " + to_string(hc.deck));
  return hc;
}

double loop_energy(const std::vector<QTensor>& s) {
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  const double dtheta = 2.0 * std::numbers::pi / double(n);
  double e = 0;
  for (std::size_t i = 0; i < n; ++i) e += norm_sq(s[(i + 1) % n] - s[i]);
  return 0.5 * e / dtheta;
}

double loop_energy(const NLoop& loop) {
  std::vector<QTensor> s;
  s.reserve(loop.size());
  for (const auto& mp : loop.samples) s.push_back(mp.q);
  return loop_energy(s);
}

NLoop swap_loop(const NLoop& loop) {
  NLoop out = loop;
  for (auto& s : out.samples) {
    s.q = -s.q;
    std::swap(s.n, s.m);
  }
  return out;
}

NLoop reverse_loop(const NLoop& loop) {
  const std::size_t n = loop.size();
  std::vector<ManifoldPoint> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = loop.samples[(n - i) % n];
  return make_loop(std::move(s));
}

NLoop shift_loop(const NLoop& loop, std::size_t k) {
  const std::size_t n = loop.size();
  std::vector<ManifoldPoint> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = loop.samples[(i + k) % n];
  return make_loop(std::move(s));
}

NLoop rotate_loop(const NLoop& loop, const Mat3& r) {
  NLoop out = loop;
  for (auto& s : out.samples) {
    s.n = r * s.n;
    s.m = r * s.m;
    s.q = QTensor::from_matrix(r * s.q.matrix() * r.transposed());
  }
  return out;
}

std::array<ClassEnergy, 5> class_energies(const MaterialParams& p) {
  const double k = p.kappa_star;
  return {{{0, 0, 0, true},
           {k, k, k, true},
           {k, k, k, true},
           {2 * k, 4 * k, 2 * k, false},
           {4 * k, 4 * k, 2 * k, true}}};
}

double e_star(ClassTag t, const MaterialParams& p) {
  return class_energies(p)[static_cast<int>(t)].e_star;
}

LoopFn loop_a0(const MaterialParams& p) {
  return [p](double th) {
    return manifold_point({1, 0, 0}, {0, std::cos(th / 2), std::sin(th / 2)}, p);
  };
}

LoopFn loop_b0(const MaterialParams& p) {
  return [p](double th) {
    return manifold_point({std::cos(th / 2), 0, std::sin(th / 2)}, {0, 1, 0}, p);
  };
}

LoopFn loop_l2(const MaterialParams& p) {
  return [p](double th) {
    const double c = std::cos(th / 2), s = std::sin(th / 2);
    return manifold_point({c, s, 0}, {-s, c, 0}, p);
  };
}

LoopFn loop_l3(const MaterialParams& p) {
  return [p](double th) {
    return manifold_point({1, 0, 0}, {0, std::cos(th), std::sin(th)}, p);
  };
}

LoopFn loop_constant(const MaterialParams& p) {
  return [p](double) { return manifold_point({1, 0, 0}, {0, 1, 0}, p); };
}

LoopFn loop_wiggle(const MaterialParams& p) {
  return [p](double th) {
    const double psi = 0.25 * std::numbers::pi * std::sin(th);
    return manifold_point({1, 0, 0}, {0, std::cos(psi), std::sin(psi)}, p);
  };
}

LoopFn concat(LoopFn f, LoopFn g) {
  return [f, g](double th) {
    return th < std::numbers::pi ? f(2.0 * th) : g(2.0 * th - 2.0 * std::numbers::pi);
  };
}

LoopFn representative(ClassTag t, const MaterialParams& p) {
  switch (t) {
    case ClassTag::H0: return loop_constant(p);
    case ClassTag::H1: return loop_a0(p);
    case ClassTag::H2: return loop_b0(p);
    case ClassTag::H3: return loop_l2(p);
    case ClassTag::H4: return loop_l3(p);
  }
  return loop_constant(p);
}

NLoop relax_loop(const NLoop& loop, const MaterialParams& p, std::size_t iterations, double step) {
  const std::size_t n = loop.size();
  const double dtheta = 2.0 * std::numbers::pi / double(n);
  const double c = step / (dtheta * dtheta);
  std::vector<ManifoldPoint> cur = loop.samples, next(n);
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const QTensor& a = cur[(i + n - 1) % n].q;
      const QTensor& b = cur[(i + 1) % n].q;
      const QTensor lap = a + b - 2.0 * cur[i].q;
      next[i] = project(cur[i].q + c * lap, p);
    }
    std::swap(cur, next);
  }
  return make_loop(std::move(cur));
}

}  // namespace ldg
