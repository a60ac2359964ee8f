#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "ldg/balls.hpp"
#include "ldg/q8.hpp"
#include "support.hpp"

using namespace ldg;

namespace {

// Smallest ball through some 1..4 of the points that holds them all.
double brute_enclosing_radius(const std::vector<Vec3>& pts) {
  const std::size_t n = pts.size();
  double best = std::numeric_limits<double>::infinity();
  auto holds = [&](Vec3 c, double r) {
    for (Vec3 p : pts)
      if (norm(p - c) > r * (1 + 1e-9) + 1e-12) return false;
    return true;
  };
  auto consider = [&](Vec3 c, double r) {
    if (r < best && holds(c, r)) best = r;
  };
  for (std::size_t i = 0; i < n; ++i) {
    consider(pts[i], 0);
    for (std::size_t j = i + 1; j < n; ++j) {
      consider(0.5 * (pts[i] + pts[j]), 0.5 * norm(pts[i] - pts[j]));
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec3 a = pts[i], ab = pts[j] - a, ac = pts[k] - a, nrm = cross(ab, ac);
        const double nn = dot(nrm, nrm);
        if (nn < 1e-20) continue;
        const Vec3 off = (1.0 / (2 * nn)) * (dot(ac, ac) * cross(nrm, ab) + dot(ab, ab) * cross(ac, nrm));
        consider(a + off, norm(off));
        for (std::size_t l = k + 1; l < n; ++l) {
          // Circumcentre of the tetrahedron by Cramer's rule.
          const Vec3 ad = pts[l] - a;
          const double det = dot(ab, cross(ac, ad));
          if (std::abs(det) < 1e-14) continue;
          const Vec3 c = (1.0 / (2 * det)) *
                         (dot(ab, ab) * cross(ac, ad) + dot(ac, ac) * cross(ad, ab) + dot(ad, ad) * cross(ab, ac));
          consider(a + c, norm(c));
        }
      }
    }
  }
  return best;
}

// Any cover of the union of B_{h/2}(p) projects onto a line to intervals whose
// total length bounds twice the summed radii.
double projection_lower_bound(const std::vector<Vec3>& pts, double h) {
  double best = 0;
  for (int a = 0; a < 64; ++a)
    for (int b = 0; b < 32; ++b) {
      const double th = std::numbers::pi * (b + 0.5) / 32, ph = 2 * std::numbers::pi * a / 64;
      const Vec3 u{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
      std::vector<double> t;
      for (Vec3 p : pts) t.push_back(dot(p, u));
      std::sort(t.begin(), t.end());
      double len = 0, lo = t[0] - h / 2, hi = t[0] + h / 2;
      for (double x : t) {
        if (x - h / 2 > hi) {
          len += hi - lo;
          lo = x - h / 2;
        }
        hi = x + h / 2;
      }
      len += hi - lo;
      best = std::max(best, len / 2);
    }
  return best;
}

// Cheapest cover over every partition into blocks, each block covered by its
// exact enclosing ball grown by h/2.
double partition_optimum(const std::vector<Vec3>& pts, double h) {
  const std::size_t n = pts.size();
  std::vector<int> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  // Restricted growth strings enumerate set partitions once each.
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int blocks) {
    if (i == n) {
      double total = 0;
      for (int b = 0; b < blocks; ++b) {
        std::vector<Vec3> part;
        for (std::size_t k = 0; k < n; ++k)
          if (label[k] == b) part.push_back(pts[k]);
        total += brute_enclosing_radius(part) + h / 2;
      }
      best = std::min(best, total);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      label[i] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  rec(0, 0);
  return n == 0 ? 0 : best;
}

std::vector<Vec3> random_points(std::mt19937_64& rng, std::size_t n, double spread, bool planar) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({u(rng), u(rng), planar ? 0.0 : u(rng)});
  return pts;
}

}  // namespace

TEST_CASE("enclosing ball agrees with brute force") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const auto pts = random_points(rng, n, 1.0, trial % 3 == 0);
    const Ball b = enclosing_ball(pts);
    for (Vec3 p : pts) CHECK(norm(p - b.center) <= b.radius * (1 + 1e-9) + 1e-12);
    CHECK(b.radius == doctest::Approx(brute_enclosing_radius(pts)).epsilon(1e-9));
  }
  CHECK(enclosing_ball(std::vector<Vec3>{}).radius == 0.0);
  // Collinear and repeated points.
  const Ball line = enclosing_ball(std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {3, 0, 0}, {1, 0, 0}});
  CHECK(line.radius == doctest::Approx(1.5));
  CHECK(norm(line.center - Vec3{1.5, 0, 0}) < 1e-12);
}

TEST_CASE("enclosing ball of balls") {
  const Ball two = enclosing_ball(std::vector<Ball>{{{0, 0, 0}, 1}, {{4, 0, 0}, 0.5}});
  CHECK(two.radius == doctest::Approx(2.75));
  CHECK(two.center.x == doctest::Approx(1.75));
  const Ball nested = enclosing_ball(std::vector<Ball>{{{0, 0, 0}, 2}, {{0.5, 0, 0}, 0.5}});
  CHECK(nested.radius == 2.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cs = random_points(rng, 2 + trial % 5, 1.0, true);
    std::vector<Ball> bs;
    for (Vec3 c : cs) bs.push_back({c, u(rng)});
    const Ball e = enclosing_ball(bs);
    double lower = 0;
    for (const Ball& b : bs) {
      CHECK(norm(b.center - e.center) + b.radius <= e.radius * (1 + 1e-9));
      lower = std::max(lower, b.radius);
    }
    // Points on the ball surfaces give an exact lower bound.
    std::vector<Vec3> rim;
    for (const Ball& b : bs)
      for (int k = 0; k < 64; ++k) {
        const double t = 2 * std::numbers::pi * k / 64;
        rim.push_back(b.center + Vec3{b.radius * std::cos(t), b.radius * std::sin(t), 0});
      }
    CHECK(e.radius >= enclosing_ball(rim).radius * (1 - 1e-9));
    CHECK(e.radius <= enclosing_ball(rim).radius * 1.01);
    CHECK(e.radius >= lower);
  }
}

TEST_CASE("set radius bounds") {
  const double h = 0.1;
  CHECK(radius_of_set({}, h) == 0.0);
  CHECK(radius_of_set({{0.3, 0.2, 0}}, h) == doctest::Approx(h / 2));
  // Far apart: two small balls; close: one ball.
  CHECK(radius_of_set({{0, 0, 0}, {5, 0, 0}}, h) == doctest::Approx(h));
  CHECK(radius_of_set({{0, 0, 0}, {0.02, 0, 0}}, h) == doctest::Approx(0.01 + h / 2));
  const std::vector<Vec3> triple{{0, 0, 0}, {0.05, 0, 0}, {0.1, 0, 0}};
  CHECK(radius_of_set(triple, h) <= diameter(triple) / 2 + h / 2 + 1e-12);
  CHECK(diameter(triple) == doctest::Approx(0.1));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const auto pts = random_points(rng, n, 0.3, trial % 2 == 0);
    const SetCover cover = cover_set(pts, h);
    CHECK(cover.total == doctest::Approx(radius_of_set(pts, h)));
    CHECK(cover.total <= std::sqrt(3.0 / 8.0) * diameter(pts) + h / 2 + 1e-12);
    CHECK(cover.total <= n * h / 2 + 1e-12);
    CHECK(cover.total >= projection_lower_bound(pts, h) * (1 - 1e-12));
    CHECK(cover.total >= partition_optimum(pts, h) * (1 - 1e-9));
    // Every small ball sits inside the cover ball that claims it.
    std::vector<int> seen(n, 0);
    for (std::size_t b = 0; b < cover.balls.size(); ++b)
      for (std::size_t k : cover.members[b]) {
        ++seen[k];
        CHECK(norm(pts[k] - cover.balls[b].center) + h / 2 <= cover.balls[b].radius * (1 + 1e-9));
      }
    for (int s : seen) CHECK(s == 1);
  }
}

TEST_CASE("set radius is subadditive over partitions") {
  const double h = 0.05;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_points(rng, 1 + trial % 4, 0.2, false);
    auto b = random_points(rng, 1 + trial % 3, 0.2, false);
    for (Vec3& p : b) p = p + Vec3{0.1 * (trial % 7), 0, 0};
    std::vector<Vec3> all = a;
    all.insert(all.end(), b.begin(), b.end());
    std::vector<std::vector<std::size_t>> parts(2);
    for (std::size_t i = 0; i < all.size(); ++i) parts[i < a.size() ? 0 : 1].push_back(i);
    CHECK(radius_of_set(all, h, parts) <= radius_of_set(a, h) + radius_of_set(b, h) + 1e-12);
  }
}

TEST_CASE("ball construction with a single ball") {
  const double s = 0.01, w = 1.5;
  BallSystem sys;
  sys.balls.push_back({{0, 0, 0}, s, w});
  const BallConstruction bc = ball_construction(sys, 0.5, 1.0);
  CHECK(bc.invariant_violations == 0);
  CHECK(bc.r_final == 1.0);
  CHECK(bc.mu_final == s);
  CHECK(bc.bound == doctest::Approx(w * std::log(1 / s)));
  CHECK(bc.certified == doctest::Approx(w * std::log(0.5 / s)));
  REQUIRE(bc.trace.size() == 1);
  CHECK(bc.trace[0].type == "boundary-hit");
}

TEST_CASE("two balls merge before reaching the boundary") {
  BallSystem sys;
  sys.balls.push_back({{0.02, 0, 0}, 0.005, 1.0});
  sys.balls.push_back({{-0.02, 0, 0}, 0.005, 1.0});
  const BallConstruction bc = ball_construction(sys, 19.0 / 40, 1.0);
  CHECK(bc.invariant_violations == 0);
  REQUIRE(bc.trace.size() == 2);
  const MergeEvent& m = bc.trace[0];
  CHECK(m.alpha == doctest::Approx(std::log(4.0)).epsilon(1e-8));
  CHECK(m.members == std::vector<std::size_t>{0, 1});
  CHECK(m.seed <= m.initial_sum * (1 + 1e-9));
  CHECK(m.seed <= 2 * 0.005 * (1 + 1e-9));
  CHECK(bc.outer_weight == 2.0);
  CHECK(bc.mu_final == doctest::Approx(0.01).epsilon(1e-8));
  CHECK(bc.bound == doctest::Approx(2.0 * std::log(bc.r_final / 0.01)).epsilon(1e-8));
  CHECK(bc.bound >= bc.certified);

  // A class weight overrides the summed weight of merged balls.
  BallConstructionOptions opt;
  opt.weight = [](Vec3, double) { return 0.75; };
  CHECK(ball_construction(sys, 0.5, 1.0, opt).outer_weight == 0.75);
  sys.outer_weight = 1.25;
  CHECK(ball_construction(sys, 0.5, 1.0).outer_weight == 1.25);
}

TEST_CASE("ball construction preconditions") {
  BallSystem sys;
  CHECK_THROWS_AS(ball_construction(sys, 0.5, 1.0), Error);
  sys.balls.push_back({{0, 0, 0}, 0.01, 1});
  CHECK_THROWS_AS(ball_construction(sys, 0.4, 1.0), Error);
  CHECK_THROWS_AS(ball_construction(sys, 0.5, 0.0), Error);
  sys.balls.push_back({{0.045, 0, 0}, 0.01, 1});
  try {
    ball_construction(sys, 0.5, 1.0);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
  sys.balls.back().radius = 0;
  CHECK_THROWS_AS(ball_construction(sys, 0.5, 1.0), Error);
}

TEST_CASE("ball construction invariants on random systems") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1), rad(1e-4, 5e-3), wt(0.5, 3);
  const double r = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    BallSystem sys;
    const int k = 1 + trial % 6;
    double sum = 0;
    while (static_cast<int>(sys.balls.size()) < k) {
      const Vec3 c{0.045 * u(rng), 0.045 * u(rng), 0};
      const double s = rad(rng);
      if (norm(c) + s > r / 20) continue;
      sys.balls.push_back({c, s, wt(rng)});
      sum += s;
    }
    const BallConstruction bc = ball_construction(sys, 19.0 / 40, r);
    CHECK(bc.invariant_violations == 0);
    CHECK(bc.mu_final <= sum * (1 + 1e-9));
    CHECK(bc.bound >= bc.certified - 1e-12);
    CHECK(bc.r_final >= 0.95 * r * (1 - 1e-12));
    for (std::size_t i = 1; i < bc.trace.size(); ++i) CHECK(bc.trace[i].alpha >= bc.trace[i - 1].alpha);
    const MergeEvent& last = bc.trace.back();
    CHECK(last.type == "boundary-hit");
    CHECK(last.members.size() == sys.balls.size());
    for (const MergeEvent& e : bc.trace) CHECK(e.seed <= e.initial_sum * (1 + 1e-9));
  }
}

TEST_CASE("homogeneous annulus energy dominates the ball bound") {
  const auto& p = ldg::test::default_params();
  // Degree-zero extension of the half-turn geodesic: the Dirichlet energy on
  // s < rho < 1 factors into the loop energy times log(1/s).
  const LoopFn a0 = loop_a0(p);
  const int n = 4096;
  const double dt = 2 * std::numbers::pi / n;
  double loop_e = 0;
  for (int k = 0; k < n; ++k) {
    const QTensor d = (1.0 / (2 * dt)) * (a0((k + 1) * dt).q - a0((k - 1) * dt).q);
    loop_e += 0.5 * norm_sq(d) * dt;
  }
  CHECK(loop_e == doctest::Approx(p.kappa_star).epsilon(1e-6));
  for (double s : {0.01, 0.02, 0.05}) {
    BallSystem sys;
    sys.balls.push_back({{0, 0, 0}, s, e_star(ClassTag::H1, p)});
    const BallConstruction bc = ball_construction(sys, 19.0 / 40, 1.0);
    CHECK(loop_e * std::log(1 / s) >= bc.bound - 1e-12 - 1e-6 * bc.bound);
  }
}

TEST_CASE("ball bound does not grow with the initial radii") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1, 1), wt(0.5, 3);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    BallSystem base;
    const int k = 1 + trial % 4;
    while (static_cast<int>(base.balls.size()) < k) {
      const Vec3 c{0.03 * u(rng), 0.03 * u(rng), 0};
      bool apart = true;
      for (const SeedBall& b : base.balls) apart = apart && norm(b.center - c) > 0.012;
      if (apart) base.balls.push_back({c, 1e-3, wt(rng)});
    }
    double prev_bound = std::numeric_limits<double>::infinity(), prev_cert = prev_bound;
    for (double s : {1e-3, 2e-3, 4e-3, 6e-3}) {
      BallSystem sys = base;
      for (SeedBall& b : sys.balls) b.radius = s;
      BallConstruction bc;
      try {
        bc = ball_construction(sys, 19.0 / 40, 1.0);
      } catch (const Error&) {
        break;  // radii now overlap
      }
      CHECK(bc.bound <= prev_bound + 1e-9);
      CHECK(bc.certified <= prev_cert + 1e-12);
      prev_bound = bc.bound;
      prev_cert = bc.certified;
      ++compared;
    }
  }
  CHECK(compared > 100);
}
