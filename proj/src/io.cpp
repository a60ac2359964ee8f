#include "ldg/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ldg/manifold.hpp"

namespace ldg {

namespace {

constexpr char kMagic[8] = {'L', 'D', 'G', 'S', 'N', 'A', 'P', '1'};

template <class T>
void put(std::ostream& os, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  os.write(b, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  char b[sizeof(T)];
  if (!is.read(b, sizeof(T))) throw Error(ErrorKind::Io, "unexpected end of binary data");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
  return os;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw Error(ErrorKind::Io, "cannot read " + path);
  return is;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

double parse(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(ErrorKind::Io, "bad number '" + s + "' in " + path);
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

Table read_table(const std::string& path) {
  std::ifstream is = open_in(path);
  Table t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    std::vector<double> row;
    for (const std::string& c : split(line)) row.push_back(parse(c, path));
    if (row.size() != t.header.size()) throw Error(ErrorKind::Io, "ragged row in " + path);
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw Error(ErrorKind::Io, "empty table " + path);
  return t;
}

std::vector<int> columns(const Table& t, std::initializer_list<const char*> names) {
  std::vector<int> out;
  for (const char* n : names) out.push_back(t.column(n));
  return out;
}

bool all_present(const std::vector<int>& c) {
  for (int i : c)
    if (i < 0) return false;
  return true;
}

json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

void write_tensors_csv(const std::string& path, const std::vector<QTensor>& qs) {
  std::ofstream os = open_out(path);
  os << "c1,c2,c3,c4,c5\n";
  for (const QTensor& q : qs)
    os << num(q.c[0]) << ',' << num(q.c[1]) << ',' << num(q.c[2]) << ',' << num(q.c[3]) << ',' << num(q.c[4])
       << '\n';
}

std::vector<QTensor> read_tensors_csv(const std::string& path) {
  const Table t = read_table(path);
  const auto c = columns(t, {"c1", "c2", "c3", "c4", "c5"});
  if (!all_present(c)) throw Error(ErrorKind::Io, "tensor table needs columns c1..c5: " + path);
  std::vector<QTensor> out;
  for (const auto& row : t.rows) {
    QTensor q;
    for (int k = 0; k < 5; ++k) q.c[k] = row[c[k]];
    out.push_back(q);
  }
  return out;
}

void write_tensors_bin(const std::string& path, const std::vector<QTensor>& qs) {
  std::ofstream os = open_out(path, true);
  for (const QTensor& q : qs)
    for (double v : q.c) put(os, v);
}

std::vector<QTensor> read_tensors_bin(const std::string& path) {
  std::ifstream is = open_in(path, true);
  is.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(is.tellg());
  is.seekg(0);
  if (bytes % (5 * sizeof(double)) != 0) throw Error(ErrorKind::Io, "truncated tensor array " + path);
  std::vector<QTensor> out(bytes / (5 * sizeof(double)));
  for (QTensor& q : out)
    for (double& v : q.c) v = get<double>(is);
  return out;
}

void write_loop_csv(const std::string& path, const NLoop& loop) {
  std::ofstream os = open_out(path);
  os << "theta,c1,c2,c3,c4,c5\n";
  const std::size_t n = loop.size();
  for (std::size_t k = 0; k < n; ++k) {
    const QTensor& q = loop.samples[k].q;
    os << num(2.0 * std::numbers::pi * k / n);
    for (double v : q.c) os << ',' << num(v);
    os << '\n';
  }
}

NLoop read_loop_csv(const std::string& path, const MaterialParams& p) {
  const Table t = read_table(path);
  const auto tc = columns(t, {"c1", "c2", "c3", "c4", "c5"});
  if (all_present(tc)) {
    std::vector<QTensor> qs;
    for (const auto& row : t.rows) {
      QTensor q;
      for (int k = 0; k < 5; ++k) q.c[k] = row[tc[k]];
      qs.push_back(q);
    }
    return make_loop(qs, p);
  }
  const auto fc = columns(t, {"nx", "ny", "nz", "mx", "my", "mz"});
  if (!all_present(fc)) throw Error(ErrorKind::Io, "loop table needs c1..c5 or nx..mz columns: " + path);
  std::vector<ManifoldPoint> pts;
  for (const auto& row : t.rows) {
    const Vec3 n{row[fc[0]], row[fc[1]], row[fc[2]]}, m{row[fc[3]], row[fc[4]], row[fc[5]]};
    if (std::abs(norm(n) - 1) > 1e-6 || std::abs(norm(m) - 1) > 1e-6 || std::abs(dot(n, m)) > 1e-6)
      throw Error(ErrorKind::InvalidParameter, "loop frame is not orthonormal in " + path);
    pts.push_back(manifold_point(n, m, p));
  }
  return make_loop(std::move(pts));
}

void write_snapshot(const std::string& path, const Field& f) {
  std::ofstream os = open_out(path, true);
  const Domain& d = f.domain;
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.kind));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.dim));
  for (int a = 0; a < 3; ++a) put<std::int32_t>(os, d.n[a]);
  for (int a = 0; a < 3; ++a) put<double>(os, d.extents[a]);
  put<double>(os, d.h);
  put<double>(os, f.eps);
  put<double>(os, f.params.a2);
  put<double>(os, f.params.a4);
  put<double>(os, f.params.a6);
  put<double>(os, f.params.a6p);
  for (const QTensor& q : f.values)
    for (double v : q.c) put(os, v);
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path);
}

Field read_snapshot(const std::string& path) {
  std::ifstream is = open_in(path, true);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw Error(ErrorKind::Io, "not a field snapshot: " + path);
  if (get<std::uint32_t>(is) != 1) throw Error(ErrorKind::Io, "unsupported snapshot version: " + path);
  const auto kind = get<std::uint32_t>(is);
  if (kind > static_cast<std::uint32_t>(DomainKind::Cylinder3d)) throw Error(ErrorKind::Io, "bad domain kind");
  const auto dim = get<std::uint32_t>(is);
  std::array<int, 3> n{};
  for (int a = 0; a < 3; ++a) n[a] = get<std::int32_t>(is);
  std::array<double, 3> ext{};
  for (int a = 0; a < 3; ++a) ext[a] = get<double>(is);
  const double h = get<double>(is), eps = get<double>(is);
  const double a2 = get<double>(is), a4 = get<double>(is), a6 = get<double>(is), a6p = get<double>(is);
  Field f = make_field(make_domain(static_cast<DomainKind>(kind), ext, h), eps, derive_params(a2, a4, a6, a6p));
  if (static_cast<std::uint32_t>(f.domain.dim) != dim || f.domain.n != n)
    throw Error(ErrorKind::Io, "snapshot grid does not match its header: " + path);
  for (QTensor& q : f.values)
    for (double& v : q.c) v = get<double>(is);
  return f;
}

void write_field_csv(const std::string& path, const Field& f) {
  std::ofstream os = open_out(path);
  const Domain& d = f.domain;
  const EnergyReport rep = assemble_energy(f);
  os << "x,y,z,type,c1,c2,c3,c4,c5,phi0,density\n";
  for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
    if (!d.in_domain(idx)) continue;
    const Vec3 x = d.position(idx);
    const QTensor& q = f.values[idx];
    os << num(x.x) << ',' << num(x.y) << ',' << num(x.z) << ','
       << (d.mask[idx] == NodeType::Interior ? "interior" : "boundary");
    for (double v : q.c) os << ',' << num(v);
    os << ',' << num(biaxiality(q, 0.25, f.params).phi0) << ',' << num(rep.density[idx]) << '\n';
  }
}

void write_mask_csv(const std::string& path, const DefectMask& m, const Domain& d) {
  std::ofstream os = open_out(path);
  os << "component,x,y,z\n";
  for (std::size_t c = 0; c < m.components.size(); ++c)
    for (std::size_t idx : m.components[c].nodes) {
      const Vec3 x = d.position(idx);
      os << c << ',' << num(x.x) << ',' << num(x.y) << ',' << num(x.z) << '\n';
    }
}

void write_measure_csv(const std::string& path, const MeasureGrid& m) {
  std::ofstream os = open_out(path);
  os << "i,j,k,cx,cy,cz,mass\n";
  for (int k = 0; k < m.n[2]; ++k)
    for (int j = 0; j < m.n[1]; ++j)
      for (int i = 0; i < m.n[0]; ++i) {
        const std::size_t c = (static_cast<std::size_t>(k) * m.n[1] + j) * m.n[0] + i;
        if (m.mass[c] == 0.0) continue;
        const Vec3 x = m.centroid[c];
        os << i << ',' << j << ',' << k << ',' << num(x.x) << ',' << num(x.y) << ',' << num(x.z) << ','
           << num(m.mass[c]) << '\n';
      }
}

json to_json(const MaterialParams& p) {
  return {{"a2", p.a2}, {"a4", p.a4}, {"a6", p.a6}, {"a6p", p.a6p},
          {"r_star", p.r_star}, {"a1", p.a1}, {"kappa_star", p.kappa_star}};
}

MaterialParams params_from_json(const json& j) {
  return derive_params(j.value("a2", 6.0), j.value("a4", 1.0), j.value("a6", 1.0), j.value("a6p", 1.0));
}

json to_json(const HomotopyClass& hc) {
  return {{"tag", to_string(hc.tag)},
          {"deck", to_string(hc.deck)},
          {"hpair", json::array({hc.hpair.top, hc.hpair.bottom})}};
}

json to_json(const EnergyReport& r) {
  return {{"total", r.total}, {"dirichlet", r.dirichlet}, {"bulk", r.bulk},
          {"max_abs_q", r.max_abs_q}, {"max_dist", r.max_dist}};
}

json to_json(const Diagnostics& d) {
  json mono = json::array();
  for (const MonotonicityCheck& m : d.monotonicity)
    mono.push_back({{"center", vec_json(m.center)}, {"radii", m.radii}, {"values", m.values},
                    {"worst_drop", m.worst_drop}, {"monotone", m.monotone}});
  json poh = json::array();
  for (const PohozaevCheck& p : d.pohozaev)
    poh.push_back({{"center", vec_json(p.center)}, {"radius", p.radius}, {"lhs", p.lhs}, {"rhs", p.rhs},
                   {"defect", p.defect}});
  return {{"total_energy", d.total_energy}, {"tol_mono", d.tol_mono}, {"monotonicity", mono},
          {"pohozaev", poh}, {"stress_divergence", d.stress_divergence}, {"dist_sup", d.dist_sup},
          {"el_remainder", d.el_remainder}};
}

json to_json(const SliceBound& s) {
  return {{"tag", to_string(s.tag)}, {"weight", s.weight}, {"phi0_min", s.phi0_min},
          {"main_term", s.main_term}, {"energy_disk", s.energy_disk}, {"energy_circle", s.energy_circle},
          {"measured", s.measured}, {"margin", s.margin}};
}

json to_json(const BallConstruction& b) {
  json events = json::array();
  for (const MergeEvent& e : b.trace)
    events.push_back({{"alpha", e.alpha}, {"type", e.type}, {"members", e.members},
                      {"center", json::array({e.center.x, e.center.y})}, {"radius", e.radius},
                      {"seed", e.seed}, {"initial_sum", e.initial_sum}});
  return {{"bound", b.bound}, {"certified", b.certified}, {"outer_weight", b.outer_weight},
          {"alpha", b.alpha}, {"r_final", b.r_final}, {"mu_final", b.mu_final},
          {"invariant_violations", b.invariant_violations}, {"events", events}};
}

json to_json(const DefectMask& m) {
  json comps = json::array();
  for (const DefectComponent& c : m.components)
    comps.push_back({{"nodes", c.nodes.size()}, {"centroid", vec_json(c.centroid)}, {"lo", vec_json(c.lo)},
                     {"hi", vec_json(c.hi)}});
  return {{"threshold", m.threshold}, {"flagged", m.count()}, {"components", comps}};
}

json to_json(const ClearingOut& c) {
  return {{"hypothesis_holds", c.hypothesis_holds}, {"energy", c.energy}, {"threshold", c.threshold},
          {"half_ratio", c.half_ratio}, {"verdict", c.verdict()}};
}

json to_json(const JunctionReport& j) {
  json arms = json::array();
  for (const JunctionArm& a : j.arms)
    arms.push_back({{"direction", vec_json(a.direction)}, {"tag", to_string(a.tag)}, {"weight", a.weight}});
  return {{"arms", arms}, {"balance", vec_json(j.balance)}, {"balance_norm", norm(j.balance)}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os = open_out(path);
  os << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream is = open_in(path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, path + ": " + e.what());
  }
}

}  // namespace ldg
