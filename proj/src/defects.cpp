#include "ldg/defects.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "ldg/builders.hpp"
#include "ldg/diagnostics.hpp"
#include "ldg/manifold.hpp"

namespace ldg {

namespace {

constexpr double kTau = 0.25;

double phi0_of(const QTensor& q, const MaterialParams& p) { return biaxiality(q, kTau, p).phi0; }

}  // namespace

std::size_t DefectMask::count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
}

DefectMask defect_mask(const Field& f, double threshold) {
  if (!(threshold > 0 && threshold < 1))
    throw Error(ErrorKind::InvalidParameter, "mask threshold must lie in (0, 1)");
  const Domain& d = f.domain;
  DefectMask m;
  m.threshold = threshold;
  m.flagged.assign(d.node_count(), 0);
  for (std::size_t idx = 0; idx < d.node_count(); ++idx)
    if (d.mask[idx] == NodeType::Interior && phi0_of(f.values[idx], f.params) < threshold) m.flagged[idx] = 1;

  std::vector<std::uint8_t> seen(d.node_count(), 0);
  for (std::size_t start = 0; start < d.node_count(); ++start) {
    if (!m.flagged[start] || seen[start]) continue;
    DefectComponent comp;
    comp.lo = comp.hi = d.position(start);
    std::deque<std::size_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const std::size_t idx = queue.front();
      queue.pop_front();
      comp.nodes.push_back(idx);
      const auto c = d.ijk(idx);
      for (int axis = 0; axis < d.dim; ++axis)
        for (int s : {-1, 1}) {
          auto nb = c;
          nb[axis] += s;
          if (nb[axis] < 0 || nb[axis] >= d.n[axis]) continue;
          const std::size_t j = d.index(nb[0], nb[1], nb[2]);
          if (m.flagged[j] && !seen[j]) {
            seen[j] = 1;
            queue.push_back(j);
          }
        }
    }
    std::sort(comp.nodes.begin(), comp.nodes.end());
    Vec3 sum;
    for (std::size_t idx : comp.nodes) {
      const Vec3 x = d.position(idx);
      sum += x;
      for (int a = 0; a < 3; ++a) {
        comp.lo[a] = std::min(comp.lo[a], x[a]);
        comp.hi[a] = std::max(comp.hi[a], x[a]);
      }
    }
    comp.centroid = (1.0 / comp.nodes.size()) * sum;
    m.components.push_back(std::move(comp));
  }
  return m;
}

double MeasureGrid::total() const { return pairwise_sum(mass.data(), mass.size()); }

double MeasureGrid::ball_mass(Vec3 x, double r) const {
  double s = 0;
  for (std::size_t c = 0; c < mass.size(); ++c)
    if (mass[c] != 0.0 && norm(centroid[c] - x) <= r) s += mass[c];
  return s;
}

double MeasureGrid::tube_mass(Vec3 x, double radius, double half_height) const {
  double s = 0;
  for (std::size_t c = 0; c < mass.size(); ++c) {
    if (mass[c] == 0.0) continue;
    const Vec3 y = centroid[c] - x;
    if (std::hypot(y.x, y.y) <= radius && std::abs(y.z) <= half_height) s += mass[c];
  }
  return s;
}

MeasureGrid rescaled_measure(const Field& f, double cell) {
  if (!(f.eps < 0.5)) throw Error(ErrorKind::InvalidParameter, "rescaled measure needs eps < 1/2");
  if (!(cell > 0)) throw Error(ErrorKind::InvalidParameter, "cell size must be positive");
  const Domain& d = f.domain;
  const EnergyReport rep = assemble_energy(f);
  MeasureGrid m;
  m.dim = d.dim;
  m.cell = cell;
  m.log_scale = std::log(1.0 / f.eps);
  m.origin = d.origin;
  for (int a = 0; a < 3; ++a)
    m.n[a] = a < d.dim ? static_cast<int>(std::floor((d.n[a] - 1) * d.h / cell)) + 1 : 1;
  const std::size_t cells = static_cast<std::size_t>(m.n[0]) * m.n[1] * m.n[2];
  m.mass.assign(cells, 0.0);
  std::vector<Vec3> moment(cells);
  const double vol = d.cell_volume();
  for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
    if (!d.in_domain(idx) || rep.density[idx] == 0.0) continue;
    const Vec3 x = d.position(idx);
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < d.dim; ++a)
      c[a] = std::min(m.n[a] - 1, static_cast<int>(std::floor((x[a] - m.origin[a]) / cell)));
    const std::size_t k = (static_cast<std::size_t>(c[2]) * m.n[1] + c[1]) * m.n[0] + c[0];
    const double w = rep.density[idx] * vol;
    m.mass[k] += w;
    moment[k] += w * x;
  }
  m.centroid.resize(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    if (m.mass[k] > 0) m.centroid[k] = (1.0 / m.mass[k]) * moment[k];
    m.mass[k] /= m.log_scale;
  }
  m.energy_total = rep.total;
  return m;
}

DensityProfile density_estimate(const MeasureGrid& m, Vec3 x, const std::vector<double>& radii) {
  DensityProfile dp;
  dp.radii = radii;
  for (double r : radii) dp.values.push_back(m.ball_mass(x, r) / (2.0 * r));
  const std::size_t n = radii.size();
  if (n == 1) dp.extrapolated = dp.values[0];
  if (n >= 2) {
    double sr = 0, sv = 0, srr = 0, srv = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sr += radii[i];
      sv += dp.values[i];
      srr += radii[i] * radii[i];
      srv += radii[i] * dp.values[i];
    }
    const double slope = (n * srv - sr * sv) / (n * srr - sr * sr);
    dp.extrapolated = (sv - slope * sr) / n;
  }
  return dp;
}

double log_slope(const std::vector<double>& eps, const std::vector<double>& values) {
  const std::size_t n = eps.size();
  if (n < 2 || values.size() != n) throw Error(ErrorKind::InvalidParameter, "slope needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(1.0 / eps[i]);
    sx += x;
    sy += values[i];
    sxx += x * x;
    sxy += x * values[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double tube_energy_density(const Field& f, Vec3 x, double radius, double half_height) {
  const Domain& d = f.domain;
  const EnergyReport rep = assemble_energy(f);
  double e = 0;
  for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
    if (!d.in_domain(idx)) continue;
    const Vec3 y = d.position(idx) - x;
    if (std::hypot(y.x, y.y) > radius) continue;
    e += rep.density[idx] * std::clamp((half_height - std::abs(y.z)) / d.h + 0.5, 0.0, 1.0);
  }
  return e * d.cell_volume() / (2.0 * half_height);
}

std::string ClearingOut::verdict() const {
  if (!hypothesis_holds) return "hypothesis-failed";
  std::ostringstream os;
  os << "bounded(" << half_ratio << ")";
  return os.str();
}

ClearingOut clearing_out(const Field& f, Vec3 x, double r, double eta0, double eps_bar) {
  if (inner_radius(f.domain, x) < r) throw Error(ErrorKind::DomainError, "clearing-out ball leaves the domain");
  if (f.eps > eps_bar * r) throw Error(ErrorKind::Precondition, "clearing-out needs eps <= eps_bar * r");
  const EnergyReport rep = assemble_energy(f);
  ClearingOut co;
  co.energy = ball_energy(f, rep.density, x, r);
  co.threshold = eta0 * r * std::log(r / f.eps);
  co.hypothesis_holds = co.energy <= co.threshold;
  if (co.hypothesis_holds) co.half_ratio = ball_energy(f, rep.density, x, 0.5 * r) / r;
  return co;
}

std::vector<QTensor> circle_trace(const Field& f, Vec3 c, double r, std::size_t samples) {
  std::vector<QTensor> out(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = 2.0 * std::numbers::pi * k / samples;
    if (!interpolate(f, c + Vec3{r * std::cos(t), r * std::sin(t), 0}, &out[k]))
      throw Error(ErrorKind::DomainError, "circle leaves the domain");
  }
  return out;
}

SliceBound slice_lower_bound(const Field& f, double r, Vec3 center) {
  if (f.domain.dim != 2) throw Error(ErrorKind::InvalidParameter, "slice bound needs a planar field");
  if (!(f.eps < r / 80.0)) throw Error(ErrorKind::Precondition, "slice bound needs eps < r/80");
  const MaterialParams& p = f.params;
  const std::size_t n = std::max<std::size_t>(512, static_cast<std::size_t>(8 * 2 * std::numbers::pi * r / f.domain.h));
  const std::vector<QTensor> trace = circle_trace(f, center, r, n);

  SliceBound sb;
  sb.phi0_min = 1.0;
  for (const QTensor& q : trace) sb.phi0_min = std::min(sb.phi0_min, phi0_of(q, p));
  if (sb.phi0_min < 1e-3) throw Error(ErrorKind::CannotClassify, "phi0 vanishes on the circle");
  try {
    sb.tag = classify(make_loop(trace, p), p).tag;
  } catch (const Error& e) {
    throw Error(ErrorKind::CannotClassify, std::string("boundary loop: ") + e.what());
  }
  sb.weight = e_star(sb.tag, p);
  sb.main_term = sb.weight * sb.phi0_min * sb.phi0_min * std::log(r / f.eps);

  const EnergyReport rep = assemble_energy(f);
  sb.energy_disk = ball_energy(f, rep.density, center, r);
  const double ds = 2.0 * std::numbers::pi * r / n;
  double ec = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const QTensor dq = (1.0 / (2.0 * ds)) * (trace[(k + 1) % n] - trace[(k + n - 1) % n]);
    ec += 0.5 * norm_sq(dq) + bulk_energy(trace[k], p) / (f.eps * f.eps);
  }
  sb.energy_circle = ec * ds;
  sb.measured = sb.energy_disk + 4.0 * std::log(5.0) * sb.energy_circle;
  sb.margin = sb.measured - sb.main_term;
  return sb;
}

double calibrate_c_fit(const MaterialParams& p) {
  double worst = 0;
  for (double ratio : {100.0, 200.0, 400.0}) {
    const double eps = 1.0 / ratio, h = eps / 2.0;
    Field f = make_field(make_disk2d(1.0 + 4.0 * h, h), eps, p);
    fill(f, radial_extension(loop_a0(p), eps));
    const SliceBound sb = slice_lower_bound(f, 1.0);
    worst = std::max(worst, sb.main_term - sb.measured);
  }
  return 1.1 * worst;
}

namespace {

struct SpherePoint {
  Vec3 dir;
  double phi0;
  bool low;
};

// Tensor loop on the circle of angular radius beta around direction v on S_r(c).
std::vector<QTensor> sphere_circle(const Field& f, Vec3 c, double r, Vec3 v, double beta, std::size_t n) {
  const Vec3 seed = std::abs(v.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 e1 = normalized(cross(v, seed)), e2 = cross(v, e1);
  std::vector<QTensor> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    const Vec3 dir = std::cos(beta) * v + std::sin(beta) * (std::cos(t) * e1 + std::sin(t) * e2);
    if (!interpolate(f, c + r * dir, &out[k])) throw Error(ErrorKind::DomainError, "sphere leaves the domain");
  }
  return out;
}

}  // namespace

JunctionReport junction_balance(const Field& f, Vec3 c, double r, double threshold) {
  if (f.domain.dim != 3) throw Error(ErrorKind::InvalidParameter, "junction analysis needs a 3D field");
  const MaterialParams& p = f.params;
  const int nt = std::max(64, static_cast<int>(4 * std::numbers::pi * r / f.domain.h));
  const int np = 2 * nt;
  std::vector<SpherePoint> pts(static_cast<std::size_t>(nt) * np);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) {
      const double th = std::numbers::pi * (i + 0.5) / nt, ph = 2.0 * std::numbers::pi * j / np;
      const Vec3 dir{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
      QTensor q;
      if (!interpolate(f, c + r * dir, &q)) throw Error(ErrorKind::DomainError, "sphere leaves the domain");
      const double ph0 = phi0_of(q, p);
      pts[static_cast<std::size_t>(i) * np + j] = {dir, ph0, ph0 < threshold};
    }

  JunctionReport rep;
  std::vector<std::uint8_t> seen(pts.size(), 0);
  for (std::size_t s = 0; s < pts.size(); ++s) {
    if (!pts[s].low || seen[s]) continue;
    std::deque<std::size_t> queue{s};
    seen[s] = 1;
    Vec3 sum;
    double wsum = 0, spread = 0;
    std::vector<std::size_t> members;
    while (!queue.empty()) {
      const std::size_t k = queue.front();
      queue.pop_front();
      members.push_back(k);
      const double w = threshold - pts[k].phi0;
      sum += w * pts[k].dir;
      wsum += w;
      const int i = static_cast<int>(k / np), j = static_cast<int>(k % np);
      const std::array<std::pair<int, int>, 4> nbs{{{i - 1, j}, {i + 1, j}, {i, (j + 1) % np}, {i, (j + np - 1) % np}}};
      for (auto [a, b] : nbs) {
        if (a < 0 || a >= nt) continue;
        const std::size_t m = static_cast<std::size_t>(a) * np + b;
        if (pts[m].low && !seen[m]) {
          seen[m] = 1;
          queue.push_back(m);
        }
      }
      // Points near the poles connect across them.
      if (i == 0 || i == nt - 1)
        for (int b = 0; b < np; ++b) {
          const std::size_t m = static_cast<std::size_t>(i) * np + b;
          if (pts[m].low && !seen[m]) {
            seen[m] = 1;
            queue.push_back(m);
          }
        }
    }
    if (wsum <= 0) continue;
    const Vec3 v = normalized(sum);
    for (std::size_t k : members) spread = std::max(spread, std::acos(std::clamp(dot(pts[k].dir, v), -1.0, 1.0)));
    JunctionArm arm;
    arm.direction = v;
    bool done = false;
    for (double beta = spread + 2.0 * f.domain.h / r; beta < 0.5 * std::numbers::pi && !done; beta *= 1.5) {
      const std::vector<QTensor> loop = sphere_circle(f, c, r, v, beta, 512);
      bool clear = true;
      for (const QTensor& q : loop) clear = clear && phi0_of(q, p) >= threshold;
      if (!clear) continue;
      arm.tag = classify(make_loop(loop, p), p).tag;
      done = true;
    }
    if (!done) throw Error(ErrorKind::CannotClassify, "no clean loop around a junction arm");
    arm.weight = e_star(arm.tag, p);
    rep.balance += arm.weight * arm.direction;
    rep.arms.push_back(arm);
  }
  return rep;
}

}  // namespace ldg
