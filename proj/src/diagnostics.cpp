#include "ldg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ldg/manifold.hpp"

namespace ldg {

DensitySplit density_split(const Field& f) {
  const Domain& d = f.domain;
  DensitySplit ds;
  ds.dirichlet.assign(d.node_count(), 0.0);
  ds.bulk.assign(d.node_count(), 0.0);
  const double ih2 = 1.0 / (d.h * d.h), ie2 = 1.0 / (f.eps * f.eps);
  for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
    if (!d.in_domain(idx)) continue;
    const auto c = d.ijk(idx);
    double sq = 0;
    for (int axis = 0; axis < d.dim; ++axis)
      for (int s : {-1, 1}) {
        auto nb = c;
        nb[axis] += s;
        if (nb[axis] < 0 || nb[axis] >= d.n[axis]) continue;
        const std::size_t j = d.index(nb[0], nb[1], nb[2]);
        if (d.in_domain(j)) sq += norm_sq(f.values[idx] - f.values[j]);
      }
    ds.dirichlet[idx] = 0.25 * sq * ih2;
    ds.bulk[idx] = ie2 * bulk_energy(f.values[idx], f.params);
  }
  return ds;
}

double ball_energy(const Field& f, const std::vector<double>& density, Vec3 c, double rho) {
  const Domain& d = f.domain;
  double e = 0;
  for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
    if (!d.in_domain(idx) || density[idx] == 0.0) continue;
    const double r = norm(d.position(idx) - c);
    const double w = std::clamp((rho - r) / d.h + 0.5, 0.0, 1.0);
    e += w * density[idx];
  }
  return e * d.cell_volume();
}

double lifted_ball_energy(const Field& f, const std::vector<double>& density, Vec3 c, double rho) {
  const Domain& d = f.domain;
  double e = 0;
  for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
    if (!d.in_domain(idx)) continue;
    const Vec3 x = d.position(idx) - c;
    const double q = rho * rho - x.x * x.x - x.y * x.y;
    if (q > 0) e += density[idx] * 2.0 * std::sqrt(q);
  }
  return e * d.cell_volume();
}

std::vector<double> monotonicity_profile(const Field& f, const std::vector<double>& density, Vec3 c,
                                         const std::vector<double>& radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  for (double rho : radii) {
    const double e = f.domain.dim == 2 ? lifted_ball_energy(f, density, c, rho)
                                       : ball_energy(f, density, c, rho);
    out.push_back(e / rho);
  }
  return out;
}

double inner_radius(const Domain& d, Vec3 c) {
  const double rxy = std::hypot(c.x, c.y);
  const auto& e = d.extents;
  switch (d.kind) {
    case DomainKind::Square2d: return e[0] / 2 - std::max(std::abs(c.x), std::abs(c.y));
    case DomainKind::Disk2d: return e[0] - rxy;
    case DomainKind::Annulus2d: return std::min(e[1] - rxy, rxy - e[0]);
    case DomainKind::Box3d:
      return std::min({e[0] / 2 - std::abs(c.x), e[1] / 2 - std::abs(c.y), e[2] / 2 - std::abs(c.z)});
    case DomainKind::Cylinder3d: return std::min(e[0] - rxy, e[1] - std::abs(c.z));
  }
  return 0;
}

namespace {

struct SurfaceSample {
  Vec3 x, normal;
  double weight;
};

std::vector<SurfaceSample> sphere_samples(int dim, Vec3 c, double rho, int n) {
  std::vector<SurfaceSample> out;
  if (dim == 2) {
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * std::numbers::pi * (k + 0.5) / n;
      const Vec3 nu{std::cos(t), std::sin(t), 0};
      out.push_back({c + rho * nu, nu, 2.0 * std::numbers::pi * rho / n});
    }
    return out;
  }
  // Fibonacci lattice.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    const Vec3 nu{r * std::cos(golden * k), r * std::sin(golden * k), z};
    out.push_back({c + rho * nu, nu, 4.0 * std::numbers::pi * rho * rho / n});
  }
  return out;
}

}  // namespace

PohozaevCheck pohozaev(const Field& f, const DensitySplit& ds, double total, Vec3 c, double rho,
                       int samples) {
  const Domain& d = f.domain;
  const int n = d.dim;
  if (samples <= 0) {
    samples = n == 2 ? std::max(512, static_cast<int>(16 * 2 * std::numbers::pi * rho / d.h))
                     : std::max(4000, static_cast<int>(16 * 4 * std::numbers::pi * rho * rho / (d.h * d.h)));
  }
  PohozaevCheck pc;
  pc.center = c;
  pc.radius = rho;
  const double grad_sq = 2.0 * ball_energy(f, ds.dirichlet, c, rho);
  const double bulk = ball_energy(f, ds.bulk, c, rho);
  double surf_e = 0, surf_nu = 0;
  const double ie2 = 1.0 / (f.eps * f.eps);
  for (const SurfaceSample& s : sphere_samples(n, c, rho, samples)) {
    QTensor q;
    std::array<QTensor, 3> g;
    if (!interpolate(f, s.x, &q) || !interpolate_gradient(f, s.x, &g))
      throw Error(ErrorKind::DomainError, "Pohozaev ball leaves the domain");
    QTensor dnu;
    double gsq = 0;
    for (int a = 0; a < n; ++a) {
      dnu += s.normal[a] * g[a];
      gsq += norm_sq(g[a]);
    }
    surf_e += s.weight * (0.5 * gsq + ie2 * bulk_energy(q, f.params));
    surf_nu += s.weight * norm_sq(dnu);
  }
  pc.lhs = 0.5 * (n - 2) * grad_sq + n * bulk + rho * surf_nu;
  pc.rhs = rho * surf_e;
  pc.defect = std::abs(pc.lhs - pc.rhs) / total;
  return pc;
}

bool default_compact(const Field& f, std::size_t idx) {
  const Domain& d = f.domain;
  if (d.mask[idx] != NodeType::Interior) return false;
  const auto c = d.ijk(idx);
  for (int axis = 0; axis < d.dim; ++axis)
    for (int s : {-2, -1, 1, 2}) {
      auto nb = c;
      nb[axis] += s;
      if (nb[axis] < 0 || nb[axis] >= d.n[axis]) return false;
      if (d.mask[d.index(nb[0], nb[1], nb[2])] != NodeType::Interior && std::abs(s) == 1) return false;
      if (!d.in_domain(d.index(nb[0], nb[1], nb[2]))) return false;
    }
  return biaxiality(f.values[idx], 0.25, f.params).phi0 >= 0.5;
}

QTensor el_remainder_at(const Field& f, std::size_t idx) {
  const QTensor lap = discrete_laplacian(f, idx);
  const ManifoldPoint base = project(f.values[idx], f.params);
  auto g = nodal_gradient(f, idx);
  for (auto& gi : g) gi = tangent_split(base, gi, f.params).tangential;
  return lap - harmonic_tension(base, g, f.params);
}

namespace {

double stress_divergence(const Field& f, const std::vector<std::size_t>& nodes) {
  const Domain& d = f.domain;
  const int n = d.dim;
  // T_ij = e delta_ij - dQ_i : dQ_j at a node (centered gradients).
  auto stress = [&](std::size_t idx, int i, int j) {
    const auto g = nodal_gradient(f, idx);
    double gsq = 0;
    for (int a = 0; a < n; ++a) gsq += norm_sq(g[a]);
    const double e = 0.5 * gsq + bulk_energy(f.values[idx], f.params) / (f.eps * f.eps);
    return (i == j ? e : 0.0) - dot(g[i], g[j]);
  };
  double worst = 0;
  for (std::size_t idx : nodes) {
    const auto c = d.ijk(idx);
    for (int i = 0; i < n; ++i) {
      double div = 0;
      for (int j = 0; j < n; ++j) {
        auto lo = c, hi = c;
        lo[j] -= 1;
        hi[j] += 1;
        div += (stress(d.index(hi[0], hi[1], hi[2]), i, j) - stress(d.index(lo[0], lo[1], lo[2]), i, j)) /
               (2.0 * d.h);
      }
      worst = std::max(worst, std::abs(div));
    }
  }
  return worst;
}

std::vector<double> radius_ladder(const Domain& d, Vec3 c) {
  const double rmax = inner_radius(d, c) - 2.0 * d.h;
  std::vector<double> r;
  for (double rho = 2.0 * d.h; rho <= rmax + 1e-12; rho += d.h) r.push_back(rho);
  return r;
}

}  // namespace

Diagnostics diagnostics(const Field& f, const DiagnosticsOptions& opt) {
  Diagnostics out;
  const DensitySplit ds = density_split(f);
  std::vector<double> density(ds.dirichlet.size());
  for (std::size_t i = 0; i < density.size(); ++i) density[i] = ds.dirichlet[i] + ds.bulk[i];
  const EnergyReport rep = assemble_energy(f);
  out.total_energy = rep.total;
  out.tol_mono = opt.tol_mono_factor * f.domain.h * rep.total;

  for (const Vec3& c : opt.centers) {
    MonotonicityCheck mc;
    mc.center = c;
    mc.radii = opt.radii.empty() ? radius_ladder(f.domain, c) : opt.radii;
    mc.values = monotonicity_profile(f, density, c, mc.radii);
    double peak = -1e300;
    for (double v : mc.values) {
      peak = std::max(peak, v);
      mc.worst_drop = std::max(mc.worst_drop, peak - v);
    }
    mc.monotone = mc.worst_drop <= out.tol_mono;
    out.monotonicity.push_back(std::move(mc));
  }
  for (const auto& [c, rho] : opt.pohozaev_balls)
    out.pohozaev.push_back(pohozaev(f, ds, rep.total > 0 ? rep.total : 1.0, c, rho));

  std::vector<std::size_t> compact;
  const auto pick = opt.compact ? opt.compact : default_compact;
  for (std::size_t idx = 0; idx < f.domain.node_count(); ++idx)
    if (pick(f, idx)) compact.push_back(idx);
  out.stress_divergence = stress_divergence(f, compact);
  for (std::size_t idx : compact) {
    out.dist_sup = std::max(out.dist_sup, dist_to_manifold(f.values[idx], f.params));
    if (biaxiality(f.values[idx], 0.25, f.params).phi0 > 0.1)
      out.el_remainder = std::max(out.el_remainder, norm(el_remainder_at(f, idx)));
  }
  return out;
}

}  // namespace ldg
