#include "ldg/balls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace ldg {

namespace {

bool contains(const Ball& b, Vec3 p) { return norm(p - b.center) <= b.radius * (1 + 1e-12) + 1e-15; }

Ball ball_from(const std::vector<Vec3>& r);

Ball circle3(Vec3 a, Vec3 b, Vec3 c) {
  const Vec3 ab = b - a, ac = c - a;
  const Vec3 n = cross(ab, ac);
  const double nn = dot(n, n);
  if (nn < 1e-24 * std::max(1e-300, dot(ab, ab) * dot(ac, ac))) {
    // Collinear: the farthest pair decides.
    Ball best{a, -1};
    for (auto [p, q] : {std::pair{a, b}, std::pair{a, c}, std::pair{b, c}}) {
      const Ball cand{0.5 * (p + q), 0.5 * norm(q - p)};
      if (cand.radius > best.radius) best = cand;
    }
    return best;
  }
  const Vec3 off = (1.0 / (2.0 * nn)) * (dot(ac, ac) * cross(n, ab) + dot(ab, ab) * cross(ac, n));
  return {a + off, norm(off)};
}

Ball sphere4(const std::vector<Vec3>& r) {
  const Vec3 a = r[0];
  Mat3 m;
  Vec3 rhs;
  for (int i = 0; i < 3; ++i) {
    const Vec3 d = r[i + 1] - a;
    m(i, 0) = 2 * d.x;
    m(i, 1) = 2 * d.y;
    m(i, 2) = 2 * d.z;
    rhs[i] = dot(d, d);
  }
  const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                     m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  const double scale = norm(r[1] - a) * norm(r[2] - a) * norm(r[3] - a) + 1e-300;
  if (std::abs(det) < 1e-12 * 8 * scale) {
    // Coplanar: smallest circumscribed ball of a triple that holds all four.
    Ball best{a, std::numeric_limits<double>::infinity()};
    for (int skip = 0; skip < 4; ++skip) {
      std::vector<Vec3> t;
      for (int i = 0; i < 4; ++i)
        if (i != skip) t.push_back(r[i]);
      const Ball b = ball_from(t);
      if (b.radius < best.radius && contains(b, r[skip])) best = b;
    }
    return best;
  }
  auto solve = [&](int col) {
    Mat3 c = m;
    for (int i = 0; i < 3; ++i) c(i, col) = rhs[i];
    return (c(0, 0) * (c(1, 1) * c(2, 2) - c(1, 2) * c(2, 1)) - c(0, 1) * (c(1, 0) * c(2, 2) - c(1, 2) * c(2, 0)) +
            c(0, 2) * (c(1, 0) * c(2, 1) - c(1, 1) * c(2, 0))) /
           det;
  };
  const Vec3 off{solve(0), solve(1), solve(2)};
  return {a + off, norm(off)};
}

Ball ball_from(const std::vector<Vec3>& r) {
  switch (r.size()) {
    case 0: return {{}, -1};
    case 1: return {r[0], 0};
    case 2: return {0.5 * (r[0] + r[1]), 0.5 * norm(r[1] - r[0])};
    case 3: return circle3(r[0], r[1], r[2]);
    default: return sphere4(r);
  }
}

Ball welzl(const std::vector<Vec3>& p, std::size_t n, std::vector<Vec3>& support) {
  if (n == 0 || support.size() == 4) return ball_from(support);
  const Vec3 q = p[n - 1];
  const Ball d = welzl(p, n - 1, support);
  if (d.radius >= 0 && contains(d, q)) return d;
  support.push_back(q);
  const Ball out = welzl(p, n - 1, support);
  support.pop_back();
  return out;
}

Ball pair_ball(const Ball& a, const Ball& b) {
  const double d = norm(b.center - a.center);
  if (d + b.radius <= a.radius) return a;
  if (d + a.radius <= b.radius) return b;
  const double r = 0.5 * (d + a.radius + b.radius);
  return {a.center + ((r - a.radius) / d) * (b.center - a.center), r};
}

double reach(const std::vector<Ball>& balls, Vec3 x) {
  double f = 0;
  for (const Ball& b : balls) f = std::max(f, norm(b.center - x) + b.radius);
  return f;
}

}  // namespace

Ball enclosing_ball(const std::vector<Vec3>& pts) {
  if (pts.empty()) return {{}, 0};
  std::vector<Vec3> p = pts;
  std::mt19937 rng(12345);
  std::shuffle(p.begin(), p.end(), rng);
  std::vector<Vec3> support;
  return welzl(p, p.size(), support);
}

Ball enclosing_ball(const std::vector<Ball>& balls) {
  if (balls.empty()) return {{}, 0};
  Ball fold = balls[0];
  for (std::size_t i = 1; i < balls.size(); ++i) fold = pair_ball(fold, balls[i]);
  if (balls.size() <= 2) return fold;

  // Badoiu-Clarkson iterations, then a compass search on the convex reach function.
  Vec3 x;
  for (const Ball& b : balls) x += b.center;
  x = (1.0 / balls.size()) * x;
  for (int k = 1; k <= 400; ++k) {
    const Ball* far = &balls[0];
    double best = -1;
    for (const Ball& b : balls) {
      const double v = norm(b.center - x) + b.radius;
      if (v > best) best = v, far = &b;
    }
    const Vec3 d = far->center - x;
    const double dn = norm(d);
    const Vec3 tip = dn > 0 ? far->center + (far->radius / dn) * d : far->center + Vec3{far->radius, 0, 0};
    x = x + (1.0 / (k + 1)) * (tip - x);
  }
  double fx = reach(balls, x);
  for (double step = 0.25 * fx; step > 1e-14 * fx; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int k = 0; k < 16; ++k) {
        const double t = 2.0 * std::numbers::pi * k / 16;
        const Vec3 y = x + Vec3{step * std::cos(t), step * std::sin(t), 0};
        const double fy = reach(balls, y);
        if (fy < fx) {
          x = y, fx = fy, moved = true;
          break;
        }
      }
    }
  }
  return fx < fold.radius ? Ball{x, fx} : fold;
}

double diameter(const std::vector<Vec3>& pts) {
  double d = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, norm(pts[i] - pts[j]));
  return d;
}

SetCover cover_set(const std::vector<Vec3>& pts, double h) {
  SetCover cover;
  if (pts.empty()) return cover;
  const double r0 = 0.5 * h;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cover.balls.push_back({pts[i], r0});
    cover.members.push_back({i});
  }
  auto merged = [&](std::size_t i, std::size_t j) {
    std::vector<Vec3> p;
    for (std::size_t k : cover.members[i]) p.push_back(pts[k]);
    for (std::size_t k : cover.members[j]) p.push_back(pts[k]);
    Ball b = enclosing_ball(p);
    b.radius += r0;
    return b;
  };
  for (;;) {
    std::size_t bi = 0, bj = 0;
    double best = 1e-15;
    Ball bb;
    bool found = false;
    for (std::size_t i = 0; i < cover.balls.size(); ++i)
      for (std::size_t j = i + 1; j < cover.balls.size(); ++j) {
        const Ball &a = cover.balls[i], &b = cover.balls[j];
        if (norm(a.center - b.center) > a.radius + b.radius + h) continue;
        const Ball m = merged(i, j);
        const double cost = m.radius - a.radius - b.radius;
        if (cost <= best) best = cost, bi = i, bj = j, bb = m, found = true;
      }
    if (!found) break;
    cover.balls[bi] = bb;
    cover.members[bi].insert(cover.members[bi].end(), cover.members[bj].begin(), cover.members[bj].end());
    cover.balls.erase(cover.balls.begin() + bj);
    cover.members.erase(cover.members.begin() + bj);
  }
  for (const Ball& b : cover.balls) cover.total += b.radius;

  Ball one = enclosing_ball(pts);
  one.radius += r0;
  if (one.radius < cover.total) {
    cover.balls = {one};
    cover.members.assign(1, {});
    for (std::size_t i = 0; i < pts.size(); ++i) cover.members[0].push_back(i);
    cover.total = one.radius;
  }
  return cover;
}

double radius_of_set(const std::vector<Vec3>& pts, double h) { return cover_set(pts, h).total; }

double radius_of_set(const std::vector<Vec3>& pts, double h,
                     const std::vector<std::vector<std::size_t>>& partition) {
  double parts = 0;
  for (const auto& block : partition) {
    std::vector<Vec3> sub;
    for (std::size_t k : block) sub.push_back(pts.at(k));
    parts += radius_of_set(sub, h);
  }
  return std::min(radius_of_set(pts, h), parts);
}

namespace {

struct LiveBall {
  Vec3 center;
  double seed = 0;
  double weight = 0;
  std::vector<std::size_t> origin;
  double radius(double alpha) const { return seed * std::exp(alpha); }
};

Vec3 planar(Vec3 v) { return {v.x, v.y, 0}; }

class Growth {
 public:
  Growth(const BallSystem& sys, double r, const BallConstructionOptions& opt) : r_(r), opt_(opt) {
    for (std::size_t i = 0; i < sys.balls.size(); ++i) {
      const SeedBall& s = sys.balls[i];
      live_.push_back({planar(s.center), s.radius, s.weight, {i}});
      initial_.push_back(s.radius);
    }
  }

  double min_gap(double a) const {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < live_.size(); ++i)
      for (std::size_t j = i + 1; j < live_.size(); ++j)
        g = std::min(g, norm(live_[i].center - live_[j].center) - live_[i].radius(a) - live_[j].radius(a));
    return g;
  }

  double boundary_gap(double a) const {
    double g = std::numeric_limits<double>::infinity();
    for (const LiveBall& b : live_) g = std::min(g, r_ - norm(b.center) - b.radius(a));
    return g;
  }

  bool one_ball(double a, Ball* out = nullptr) const {
    if (live_.size() < 2) return false;
    std::vector<Ball> bs;
    double sum = 0;
    for (const LiveBall& b : live_) {
      bs.push_back({b.center, b.radius(a)});
      sum += b.radius(a);
    }
    const Ball e = enclosing_ball(bs);
    const bool ok = norm(e.center) <= r_ / 20 * (1 + 1e-12) && e.radius <= 0.15 * r_ && e.radius <= sum;
    if (ok && out) *out = e;
    return ok;
  }

  bool event(double a) const { return min_gap(a) <= 0 || boundary_gap(a) <= 0 || one_ball(a); }

  void merge(std::vector<std::size_t> idx, const Ball& b, double a, const std::string& type) {
    std::sort(idx.begin(), idx.end());
    LiveBall m;
    m.center = planar(b.center);
    m.seed = b.radius * std::exp(-a);
    for (std::size_t i : idx) {
      m.origin.insert(m.origin.end(), live_[i].origin.begin(), live_[i].origin.end());
      m.weight += live_[i].weight;
    }
    std::sort(m.origin.begin(), m.origin.end());
    if (opt_.weight) m.weight = opt_.weight(m.center, b.radius);
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) live_.erase(live_.begin() + *it);
    live_.insert(live_.begin() + idx.front(), m);
    record(idx.front(), a, type);
  }

  void record(std::size_t k, double a, const std::string& type) {
    const LiveBall& b = live_[k];
    MergeEvent ev;
    ev.alpha = a;
    ev.type = type;
    ev.members = b.origin;
    ev.center = b.center;
    ev.radius = b.radius(a);
    ev.seed = b.seed;
    for (std::size_t i : b.origin) ev.initial_sum += initial_[i];
    trace_.push_back(ev);
    check(a);
  }

  // Case 3: merge intersecting closures, lowest pair first, until disjoint.
  void resolve_overlaps(double a) {
    for (;;) {
      bool hit = false;
      for (std::size_t i = 0; i < live_.size() && !hit; ++i)
        for (std::size_t j = i + 1; j < live_.size() && !hit; ++j) {
          const double gap = norm(live_[i].center - live_[j].center) - live_[i].radius(a) - live_[j].radius(a);
          if (gap <= 0) {
            const Ball b = pair_ball({live_[i].center, live_[i].radius(a)}, {live_[j].center, live_[j].radius(a)});
            merge({i, j}, b, a, "merge");
            hit = true;
          }
        }
      if (!hit) return;
    }
  }

  void check(double a) {
    for (const LiveBall& b : live_) {
      double s = 0;
      for (std::size_t i : b.origin) s += initial_[i];
      if (b.seed > s * (1 + 1e-10)) ++violations_;
      if (std::abs(std::log(b.radius(a) / b.seed) - a) > 1e-10 * std::max(1.0, a)) ++violations_;
    }
  }

  BallConstruction run(double lambda, double outer_weight) {
    double a = 0;
    resolve_overlaps(a);
    for (;;) {
      Ball e;
      if (one_ball(a, &e)) {
        std::vector<std::size_t> all(live_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        merge(all, e, a, "one-ball");
        continue;
      }
      if (live_.size() == 1 && boundary_gap(a) <= 0) break;
      if (live_.size() >= 2 && boundary_gap(a) <= 0) {
        // Not reached for admissible inputs; fold everything and stop.
        std::vector<Ball> bs;
        for (const LiveBall& b : live_) bs.push_back({b.center, b.radius(a)});
        std::vector<std::size_t> all(live_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        merge(all, enclosing_ball(bs), a, "forced-merge");
        break;
      }
      if (live_.size() == 1) {
        // Only the boundary event remains.
        double lo = a, hi = a + opt_.d_alpha;
        while (boundary_gap(hi) > 0) lo = hi, hi += opt_.d_alpha;
        a = bisect(lo, hi, [&](double t) { return boundary_gap(t) <= 0; });
        break;
      }
      double lo = a, hi = a + opt_.d_alpha;
      while (!event(hi)) lo = hi, hi += opt_.d_alpha;
      a = bisect(lo, hi, [&](double t) { return event(t); });
      if (min_gap(a) <= 0) resolve_overlaps(a);
      if (live_.size() >= 2 && min_gap(a) <= 0) ++violations_;
    }

    BallConstruction out;
    const LiveBall& last = live_.front();
    // The last ball touches the outer circle: radius r - |center|.
    out.center_final = last.center;
    out.r_final = r_ - norm(last.center);
    out.mu_final = last.seed;
    out.alpha = std::log(out.r_final / out.mu_final);
    MergeEvent hit;
    hit.alpha = out.alpha;
    hit.type = "boundary-hit";
    hit.members = last.origin;
    hit.center = last.center;
    hit.radius = out.r_final;
    hit.seed = last.seed;
    for (std::size_t i : last.origin) hit.initial_sum += initial_[i];
    trace_.push_back(hit);

    out.outer_weight = outer_weight >= 0 ? outer_weight : last.weight;
    out.bound = out.outer_weight * out.alpha;
    double sum0 = 0;
    for (double s : initial_) sum0 += s;
    out.certified = out.outer_weight * std::log(lambda * r_ / sum0);
    out.trace = trace_;
    out.invariant_violations = violations_;
    return out;
  }

 private:
  template <class Pred>
  double bisect(double lo, double hi, Pred p) const {
    while (hi - lo > opt_.bisection_tol) {
      const double mid = 0.5 * (lo + hi);
      (p(mid) ? hi : lo) = mid;
    }
    return hi;
  }

  double r_;
  BallConstructionOptions opt_;
  std::vector<LiveBall> live_;
  std::vector<double> initial_;
  std::vector<MergeEvent> trace_;
  int violations_ = 0;
};

}  // namespace

BallConstruction ball_construction(const BallSystem& initial, double lambda, double r,
                                   const BallConstructionOptions& opt) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidParameter, "outer radius must be positive");
  if (!(lambda >= 19.0 / 40.0)) throw Error(ErrorKind::InvalidParameter, "lambda must be at least 19/40");
  if (initial.balls.empty()) throw Error(ErrorKind::InvalidParameter, "no initial balls");
  for (const SeedBall& b : initial.balls) {
    if (!(b.radius > 0)) throw Error(ErrorKind::InvalidParameter, "ball radii must be positive");
    if (norm(planar(b.center)) + b.radius > r / 20 * (1 + 1e-12))
      throw Error(ErrorKind::Precondition, "initial ball outside B_{r/20}");
  }
  return Growth(initial, r, opt).run(lambda, initial.outer_weight);
}

}  // namespace ldg
