// Set radius by ball covers and the vortex-ball growth/merging lower bound.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ldg/qtensor.hpp"

namespace ldg {

struct Ball {
  Vec3 center;
  double radius = 0;
};

// Smallest ball containing the points (exact, Welzl).
Ball enclosing_ball(const std::vector<Vec3>& pts);
// A ball containing all given balls; minimal for two, near-minimal otherwise
// (the search moves the center in the xy-plane).
Ball enclosing_ball(const std::vector<Ball>& balls);

struct SetCover {
  std::vector<Ball> balls;
  std::vector<std::vector<std::size_t>> members;
  double total = 0;  // sum of radii
};

// Greedy cover of the union of B_{h/2}(p): start from one ball per point and
// merge while the merged ball is no larger than the pair, lowest pair first.
// Also tries the single enclosing ball and keeps the smaller total.
SetCover cover_set(const std::vector<Vec3>& pts, double h);
double radius_of_set(const std::vector<Vec3>& pts, double h);
// Never exceeds the sum over the parts of the partition.
double radius_of_set(const std::vector<Vec3>& pts, double h,
                     const std::vector<std::vector<std::size_t>>& partition);
double diameter(const std::vector<Vec3>& pts);

struct SeedBall {
  Vec3 center;  // planar, z ignored
  double radius = 0;
  double weight = 0;  // E* of the class on the bounding circle
};

struct BallSystem {
  std::vector<SeedBall> balls;
  double outer_weight = -1;  // E* on the outer circle; negative: take the final ball's weight
};

struct MergeEvent {
  double alpha = 0;
  std::string type;  // merge, one-ball, boundary-hit
  std::vector<std::size_t> members;  // initial ball indices covered by the new ball
  Vec3 center;
  double radius = 0, seed = 0;
  double initial_sum = 0;  // sum of the initial radii of the members
};

// E* for the ball with the given center and radius; used for merged balls.
using ClassWeight = std::function<double(Vec3, double)>;

struct BallConstructionOptions {
  double d_alpha = 1e-3;
  double bisection_tol = 1e-10;
  ClassWeight weight;  // empty: merged weight is the sum of member weights
};

struct BallConstruction {
  double bound = 0;      // E*_outer log(r_final / mu_final)
  double certified = 0;  // E*_outer log(lambda r / sum of initial radii)
  double outer_weight = 0;
  double alpha = 0, r_final = 0, mu_final = 0;
  Vec3 center_final;
  std::vector<MergeEvent> trace;
  int invariant_violations = 0;  // seed, disjointness or alpha checks that failed
};

BallConstruction ball_construction(const BallSystem& initial, double lambda, double r,
                                   const BallConstructionOptions& opt = {});

}  // namespace ldg
