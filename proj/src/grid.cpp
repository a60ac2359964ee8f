#include "ldg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ldg/manifold.hpp"
#include "stencil.hpp"

namespace ldg {

const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Square2d: return "square2d";
    case DomainKind::Disk2d: return "disk2d";
    case DomainKind::Annulus2d: return "annulus2d";
    case DomainKind::Box3d: return "box3d";
    case DomainKind::Cylinder3d: return "cylinder3d";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& s) {
  for (DomainKind k : {DomainKind::Square2d, DomainKind::Disk2d, DomainKind::Annulus2d,
                       DomainKind::Box3d, DomainKind::Cylinder3d})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::InvalidParameter, "unknown domain kind: " + s);
}

std::array<int, 3> Domain::ijk(std::size_t idx) const {
  const int i = static_cast<int>(idx % n[0]);
  const std::size_t rest = idx / n[0];
  return {i, static_cast<int>(rest % n[1]), static_cast<int>(rest / n[1])};
}

Vec3 Domain::position(std::size_t idx) const {
  const auto c = ijk(idx);
  return {origin.x + h * c[0], origin.y + h * c[1], origin.z + h * c[2]};
}

double Domain::cell_volume() const { return dim == 2 ? h * h : h * h * h; }

double Domain::min_extent() const {
  switch (kind) {
    case DomainKind::Square2d: return extents[0];
    case DomainKind::Disk2d: return 2.0 * extents[0];
    case DomainKind::Annulus2d: return extents[1] - extents[0];
    case DomainKind::Box3d: return std::min({extents[0], extents[1], extents[2]});
    case DomainKind::Cylinder3d: return std::min(2.0 * extents[0], 2.0 * extents[1]);
  }
  return 0;
}

namespace {

void classify_nodes(Domain& d, const std::function<bool(Vec3)>& inside) {
  const std::size_t total = static_cast<std::size_t>(d.n[0]) * d.n[1] * d.n[2];
  d.mask.assign(total, NodeType::Exterior);
  for (std::size_t idx = 0; idx < total; ++idx)
    if (inside(d.position(idx))) d.mask[idx] = NodeType::Interior;

  auto neighbors_inside = [&](std::size_t idx, NodeType want, bool* all_present) {
    const auto c = d.ijk(idx);
    int count = 0;
    *all_present = true;
    for (int axis = 0; axis < d.dim; ++axis)
      for (int s : {-1, 1}) {
        auto cc = c;
        cc[axis] += s;
        if (cc[axis] < 0 || cc[axis] >= d.n[axis]) {
          *all_present = false;
          continue;
        }
        const NodeType t = d.mask[d.index(cc[0], cc[1], cc[2])];
        if (t == NodeType::Exterior) *all_present = false;
        if (t == want) ++count;
      }
    return count;
  };

  std::vector<NodeType> next = d.mask;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (d.mask[idx] == NodeType::Exterior) continue;
    bool full = true;
    neighbors_inside(idx, NodeType::Interior, &full);
    if (!full) next[idx] = NodeType::Boundary;
  }
  d.mask = next;
  // Boundary nodes must touch the interior.
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (d.mask[idx] != NodeType::Boundary) continue;
    bool full = true;
    if (neighbors_inside(idx, NodeType::Interior, &full) == 0) next[idx] = NodeType::Exterior;
  }
  d.mask = next;
}

Domain centered_grid(DomainKind kind, int dim, double h, std::array<int, 3> half) {
  if (!(h > 0)) throw Error(ErrorKind::InvalidParameter, "grid spacing must be positive");
  Domain d;
  d.kind = kind;
  d.dim = dim;
  d.h = h;
  for (int a = 0; a < 3; ++a) d.n[a] = a < dim ? 2 * half[a] + 1 : 1;
  d.origin = {-h * half[0], -h * half[1], dim == 3 ? -h * half[2] : 0.0};
  return d;
}

int cells_to(double len, double h) { return static_cast<int>(std::ceil(len / h - 1e-9)); }
int cells_round(double len, double h) { return std::max(1, static_cast<int>(std::lround(len / h))); }

}  // namespace

Domain make_square2d(double side, double h) {
  const int m = cells_round(side / 2.0, h);
  Domain d = centered_grid(DomainKind::Square2d, 2, h, {m, m, 0});
  d.extents = {2.0 * m * h, 0, 0};
  classify_nodes(d, [](Vec3) { return true; });
  return d;
}

Domain make_disk2d(double radius, double h) {
  const int m = cells_to(radius, h);
  Domain d = centered_grid(DomainKind::Disk2d, 2, h, {m, m, 0});
  d.extents = {radius, 0, 0};
  const double r2 = radius * radius * (1.0 + 1e-12);
  classify_nodes(d, [r2](Vec3 x) { return x.x * x.x + x.y * x.y <= r2; });
  return d;
}

Domain make_annulus2d(double r_in, double r_out, double h) {
  if (!(r_in > 0 && r_out > r_in)) throw Error(ErrorKind::InvalidParameter, "annulus radii");
  const int m = cells_to(r_out, h);
  Domain d = centered_grid(DomainKind::Annulus2d, 2, h, {m, m, 0});
  d.extents = {r_in, r_out, 0};
  const double lo = r_in * r_in * (1.0 - 1e-12), hi = r_out * r_out * (1.0 + 1e-12);
  classify_nodes(d, [lo, hi](Vec3 x) {
    const double q = x.x * x.x + x.y * x.y;
    return q >= lo && q <= hi;
  });
  return d;
}

Domain make_box3d(double ax, double ay, double az, double h) {
  const std::array<int, 3> m = {cells_round(ax / 2, h), cells_round(ay / 2, h), cells_round(az / 2, h)};
  Domain d = centered_grid(DomainKind::Box3d, 3, h, m);
  d.extents = {2.0 * m[0] * h, 2.0 * m[1] * h, 2.0 * m[2] * h};
  classify_nodes(d, [](Vec3) { return true; });
  return d;
}

Domain make_cylinder3d(double radius, double half_length, double h) {
  const int m = cells_to(radius, h), mz = cells_round(half_length, h);
  Domain d = centered_grid(DomainKind::Cylinder3d, 3, h, {m, m, mz});
  d.extents = {radius, mz * h, 0};
  const double r2 = radius * radius * (1.0 + 1e-12);
  classify_nodes(d, [r2](Vec3 x) { return x.x * x.x + x.y * x.y <= r2; });
  return d;
}

Domain make_domain(DomainKind kind, std::array<double, 3> e, double h) {
  switch (kind) {
    case DomainKind::Square2d: return make_square2d(e[0], h);
    case DomainKind::Disk2d: return make_disk2d(e[0], h);
    case DomainKind::Annulus2d: return make_annulus2d(e[0], e[1], h);
    case DomainKind::Box3d: return make_box3d(e[0], e[1], e[2], h);
    case DomainKind::Cylinder3d: return make_cylinder3d(e[0], e[1], h);
  }
  throw Error(ErrorKind::InvalidParameter, "unknown domain kind");
}

Field make_field(Domain d, double eps, const MaterialParams& p) {
  if (!(eps > 0) || !(eps < d.min_extent() / 2.0))
    throw Error(ErrorKind::InvalidParameter, "eps must lie in (0, min extent / 2)");
  Field f;
  f.values.assign(d.node_count(), QTensor{});
  f.domain = std::move(d);
  f.eps = eps;
  f.params = p;
  return f;
}

namespace detail {

Stencil build_stencil(const Domain& d) {
  Stencil st;
  st.dim = d.dim;
  st.width = 2 * d.dim;
  st.h = d.h;
  std::vector<std::int32_t> compact(d.node_count(), -1);
  for (std::size_t idx = 0; idx < d.node_count(); ++idx)
    if (d.in_domain(idx)) {
      compact[idx] = static_cast<std::int32_t>(st.grid_index.size());
      st.grid_index.push_back(idx);
      st.interior.push_back(d.mask[idx] == NodeType::Interior);
    }
  st.nbr.assign(st.size() * st.width, -1);
  for (std::size_t c = 0; c < st.size(); ++c) {
    const auto ijk = d.ijk(st.grid_index[c]);
    int slot = 0;
    for (int axis = 0; axis < d.dim; ++axis)
      for (int s : {-1, 1}) {
        auto nb = ijk;
        nb[axis] += s;
        if (nb[axis] >= 0 && nb[axis] < d.n[axis])
          st.nbr[c * st.width + slot] = compact[d.index(nb[0], nb[1], nb[2])];
        ++slot;
      }
  }
  return st;
}

double energy_and_gradient(const Stencil& st, const double* x, double eps, const MaterialParams& p,
                           double* grad, Reduction mode) {
  const double h = st.h;
  const double wdir = st.dim == 2 ? 1.0 : h;  // h^(d-2)
  const double wbulk = (st.dim == 2 ? h * h : h * h * h) / (eps * eps);
  return parallel_sum(st.size(), 4096, mode, [&](std::size_t b, std::size_t e) {
    double acc = 0;
    for (std::size_t c = b; c < e; ++c) {
      const double* q = x + 5 * c;
      double diff[5] = {0, 0, 0, 0, 0};
      double sq = 0;
      for (int s = 0; s < st.width; ++s) {
        const std::int32_t nb = st.nbr[c * st.width + s];
        if (nb < 0) continue;
        const double* o = x + 5 * static_cast<std::size_t>(nb);
        for (int k = 0; k < 5; ++k) {
          const double dk = q[k] - o[k];
          diff[k] += dk;
          sq += dk * dk;
        }
      }
      QTensor qt;
      for (int k = 0; k < 5; ++k) qt.c[k] = q[k];
      QTensor psi;
      const bool inner = st.interior[c] != 0;
      const double fb = bulk_energy_and_gradient(qt, p, (grad && inner) ? &psi : nullptr);
      acc += 0.25 * wdir * sq + wbulk * fb;
      if (grad) {
        double* g = grad + 5 * c;
        for (int k = 0; k < 5; ++k) g[k] = inner ? wdir * diff[k] + wbulk * psi.c[k] : 0.0;
      }
    }
    return acc;
  });
}

}  // namespace detail

namespace {

std::vector<double> pack(const Field& f, const detail::Stencil& st) {
  std::vector<double> x(5 * st.size());
  for (std::size_t c = 0; c < st.size(); ++c)
    for (int k = 0; k < 5; ++k) x[5 * c + k] = f.values[st.grid_index[c]].c[k];
  return x;
}

}  // namespace

EnergyReport assemble_energy(const Field& f, Reduction mode) {
  const Domain& d = f.domain;
  const detail::Stencil st = detail::build_stencil(d);
  const double h2 = d.h * d.h, vol = d.cell_volume(), ie2 = 1.0 / (f.eps * f.eps);
  EnergyReport rep;
  rep.density.assign(d.node_count(), 0.0);
  std::vector<double> dir(st.size()), bulk(st.size()), qmax(st.size()), dmax(st.size());
  parallel_chunks(st.size(), 4096, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t c = b; c < e; ++c) {
      const QTensor& q = f.values[st.grid_index[c]];
      double sq = 0;
      for (int s = 0; s < st.width; ++s) {
        const std::int32_t nb = st.nbr[c * st.width + s];
        if (nb >= 0) sq += norm_sq(q - f.values[st.grid_index[nb]]);
      }
      dir[c] = 0.25 * sq / h2;
      bulk[c] = ie2 * bulk_energy(q, f.params);
      qmax[c] = norm(q);
      dmax[c] = dist_to_manifold(q, f.params);
    }
  });
  auto sum = [&](const std::vector<double>& v) {
    return parallel_sum(v.size(), 4096, mode, [&](std::size_t b, std::size_t e) {
      double s = 0;
      for (std::size_t i = b; i < e; ++i) s += v[i];
      return s;
    });
  };
  rep.dirichlet = vol * sum(dir);
  rep.bulk = vol * sum(bulk);
  rep.total = rep.dirichlet + rep.bulk;
  for (std::size_t c = 0; c < st.size(); ++c) {
    rep.density[st.grid_index[c]] = dir[c] + bulk[c];
    rep.max_abs_q = std::max(rep.max_abs_q, qmax[c]);
    rep.max_dist = std::max(rep.max_dist, dmax[c]);
  }
  return rep;
}

std::vector<QTensor> energy_gradient(const Field& f, Reduction mode) {
  const detail::Stencil st = detail::build_stencil(f.domain);
  const std::vector<double> x = pack(f, st);
  std::vector<double> g(x.size());
  detail::energy_and_gradient(st, x.data(), f.eps, f.params, g.data(), mode);
  std::vector<QTensor> out(f.domain.node_count());
  for (std::size_t c = 0; c < st.size(); ++c)
    for (int k = 0; k < 5; ++k) out[st.grid_index[c]].c[k] = g[5 * c + k];
  return out;
}

QTensor discrete_laplacian(const Field& f, std::size_t idx) {
  const Domain& d = f.domain;
  const auto c = d.ijk(idx);
  QTensor lap;
  for (int axis = 0; axis < d.dim; ++axis)
    for (int s : {-1, 1}) {
      auto nb = c;
      nb[axis] += s;
      lap += f.values[d.index(nb[0], nb[1], nb[2])] - f.values[idx];
    }
  return (1.0 / (d.h * d.h)) * lap;
}

double el_residual(const Field& f) {
  const Domain& d = f.domain;
  const double e2 = f.eps * f.eps;
  double worst = 0;
  for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
    if (d.mask[idx] != NodeType::Interior) continue;
    const QTensor r = bulk_gradient(f.values[idx], f.params) - e2 * discrete_laplacian(f, idx);
    worst = std::max(worst, norm(r));
  }
  return worst;
}

std::array<QTensor, 3> nodal_gradient(const Field& f, std::size_t idx) {
  const Domain& d = f.domain;
  const auto c = d.ijk(idx);
  std::array<QTensor, 3> g{};
  for (int axis = 0; axis < d.dim; ++axis) {
    auto lo = c, hi = c;
    lo[axis] -= 1;
    hi[axis] += 1;
    const bool has_lo = lo[axis] >= 0 && d.in_domain(d.index(lo[0], lo[1], lo[2]));
    const bool has_hi = hi[axis] < d.n[axis] && d.in_domain(d.index(hi[0], hi[1], hi[2]));
    if (has_lo && has_hi)
      g[axis] = (0.5 / d.h) * (f.values[d.index(hi[0], hi[1], hi[2])] -
                               f.values[d.index(lo[0], lo[1], lo[2])]);
    else if (has_hi)
      g[axis] = (1.0 / d.h) * (f.values[d.index(hi[0], hi[1], hi[2])] - f.values[idx]);
    else if (has_lo)
      g[axis] = (1.0 / d.h) * (f.values[idx] - f.values[d.index(lo[0], lo[1], lo[2])]);
  }
  return g;
}

namespace {

template <class T, class Get>
bool multilinear(const Domain& d, Vec3 x, T* out, Get get) {
  int base[3] = {0, 0, 0};
  double frac[3] = {0, 0, 0};
  for (int a = 0; a < d.dim; ++a) {
    const double u = (x[a] - d.origin[a]) / d.h;
    int i = static_cast<int>(std::floor(u));
    if (i < 0 || i > d.n[a] - 1) return false;
    if (i == d.n[a] - 1) i = d.n[a] - 2;
    if (i < 0) return false;
    base[a] = i;
    frac[a] = u - i;
    if (frac[a] < -1e-12 || frac[a] > 1 + 1e-12) return false;
  }
  T acc{};
  const int corners = d.dim == 2 ? 4 : 8;
  for (int c = 0; c < corners; ++c) {
    int ii[3] = {base[0], base[1], base[2]};
    double w = 1.0;
    for (int a = 0; a < d.dim; ++a) {
      const int bit = (c >> a) & 1;
      ii[a] += bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    const std::size_t idx = d.index(ii[0], ii[1], ii[2]);
    if (!d.in_domain(idx)) {
      if (w > 1e-12) return false;
      continue;
    }
    get(idx, w, acc);
  }
  *out = acc;
  return true;
}

}  // namespace

bool interpolate(const Field& f, Vec3 x, QTensor* out) {
  return multilinear(f.domain, x, out,
                     [&](std::size_t idx, double w, QTensor& acc) { acc += w * f.values[idx]; });
}

bool interpolate_gradient(const Field& f, Vec3 x, std::array<QTensor, 3>* out) {
  return multilinear(f.domain, x, out, [&](std::size_t idx, double w, std::array<QTensor, 3>& acc) {
    const auto g = nodal_gradient(f, idx);
    for (int a = 0; a < 3; ++a) acc[a] += w * g[a];
  });
}

double max_boundary_norm(const Field& f) {
  double m = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.domain.mask[i] == NodeType::Boundary) m = std::max(m, norm(f.values[i]));
  return m;
}

double max_norm(const Field& f) {
  double m = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.domain.in_domain(i)) m = std::max(m, norm(f.values[i]));
  return m;
}

}  // namespace ldg
