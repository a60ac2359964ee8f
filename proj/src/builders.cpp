#include "ldg/builders.hpp"

#include <cmath>
#include <numbers>

namespace ldg {

double eta(double rho, double eps) { return rho < eps ? rho / eps : 1.0; }

void fill(Field& f, const TensorFn& fn, FillTarget target) {
  const Domain& d = f.domain;
  for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
    const NodeType t = d.mask[idx];
    if (t == NodeType::Exterior) continue;
    if (target == FillTarget::Boundary && t != NodeType::Boundary) continue;
    if (target == FillTarget::Interior && t != NodeType::Interior) continue;
    f.values[idx] = fn(d.position(idx));
  }
}

TensorFn radial_extension(const LoopFn& loop, double eps) {
  return [loop, eps](Vec3 x) {
    const double rho = std::hypot(x.x, x.y);
    return eta(rho, eps) * loop(std::atan2(x.y, x.x)).q;
  };
}

Field hedgehog_2d(ClassTag tag, double eps, double r, double h, const MaterialParams& p) {
  if (tag == ClassTag::H0)
    throw Error(ErrorKind::InvalidParameter, "trivial class: use a constant extension instead");
  if (!(eps < r / 80.0)) throw Error(ErrorKind::InvalidParameter, "hedgehog needs eps < r/80");
  Field f = make_field(make_disk2d(r, h), eps, p);
  fill(f, radial_extension(representative(tag, p), eps));
  return f;
}

namespace {

double angle_0_2pi(double y, double x) {
  double a = std::atan2(y, x);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a;
}

}  // namespace

Quat CoreAnsatz::frame(Vec3 x) const {
  if (axes.size() == 1) return axis_angle(axes[0], std::atan2(x.y, x.x) / 2.0);
  const double d = separation;
  const double t0 = angle_0_2pi(x.y, x.x - d);
  const double t1 = std::atan2(x.y, x.x + d);
  return axis_angle(axes[0], t0 / 2.0) * axis_angle(axes[1], t1 / 2.0);
}

QTensor CoreAnsatz::tensor(Vec3 x, double eps) const {
  double amp = 1.0;
  if (eps > 0) {
    if (axes.size() == 1) {
      amp = eta(std::hypot(x.x, x.y), eps);
    } else {
      amp = eta(std::hypot(x.x - separation, x.y), eps) * eta(std::hypot(x.x + separation, x.y), eps);
    }
  }
  return amp * cover_project(frame(x), params).q;
}

LoopFn CoreAnsatz::trace(double radius) const {
  const CoreAnsatz self = *this;
  return [self, radius](double th) {
    return cover_project(self.frame({radius * std::cos(th), radius * std::sin(th), 0}), self.params);
  };
}

CoreAnsatz core_ansatz(ClassTag tag, double separation, const MaterialParams& p) {
  const Vec3 ax{1, 0, 0}, ay{0, -1, 0};
  CoreAnsatz a;
  a.params = p;
  a.separation = separation;
  switch (tag) {
    case ClassTag::H1: a.axes = {ax}; break;
    case ClassTag::H2: a.axes = {ay}; break;
    case ClassTag::H3: a.axes = {ax, ay}; break;
    case ClassTag::H4: a.axes = {ax, ax}; break;
    case ClassTag::H0: throw Error(ErrorKind::InvalidParameter, "no cores in the trivial class");
  }
  return a;
}

TensorFn wiggle_extension(double radius, const MaterialParams& p) {
  return [radius, p](Vec3 x) {
    const double rho = std::hypot(x.x, x.y);
    const double psi = 0.25 * std::numbers::pi * std::min(1.0, rho / radius) * (rho > 0 ? x.y / rho : 0.0);
    return manifold_point({1, 0, 0}, {0, std::cos(psi), std::sin(psi)}, p).q;
  };
}

Field disk_problem(ClassTag tag, double radius, double eps, double h, const MaterialParams& p,
                   double separation) {
  Field f = make_field(make_disk2d(radius, h), eps, p);
  if (tag == ClassTag::H0) {
    fill(f, wiggle_extension(radius, p));
    return f;
  }
  const CoreAnsatz a = core_ansatz(tag, separation, p);
  const LoopFn edge = a.trace(radius);
  fill(f, [&](Vec3 x) { return edge(std::atan2(x.y, x.x)).q; }, FillTarget::Boundary);
  fill(f, [&](Vec3 x) { return a.tensor(x, eps); }, FillTarget::Interior);
  return f;
}

Field cylinder_boundary(const LoopFn& loop, double radius, double half_length, double eps, double h,
                        const MaterialParams& p, const TensorFn& cap) {
  Field f = make_field(make_cylinder3d(radius, half_length, h), eps, p);
  const double zcap = f.domain.extents[1] - 0.5 * h;
  const TensorFn transport = radial_extension(loop, eps);
  const TensorFn cap_fn = cap ? cap : transport;
  fill(f, transport, FillTarget::Interior);
  fill(f,
       [&](Vec3 x) {
         if (std::abs(x.z) >= zcap) return cap_fn(x);
         return loop(std::atan2(x.y, x.x)).q;
       },
       FillTarget::Boundary);
  return f;
}

Field annulus_problem(const LoopFn& loop, double r_in, double r_out, double eps, double h,
                      const MaterialParams& p) {
  Field f = make_field(make_annulus2d(r_in, r_out, h), eps, p);
  fill(f, [&](Vec3 x) { return loop(std::atan2(x.y, x.x)).q; });
  return f;
}

}  // namespace ldg
