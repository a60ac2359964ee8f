#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace ldg;
using ldg::test::default_params;

namespace {

bool conjugate(Q8 a, Q8 b) {
  for (Q8 g : q8_elements())
    if (q8_mul(q8_mul(g, a), q8_inverse(g)) == b) return true;
  return false;
}

// Runs backwards from the same base frame, so lifts start at the same fiber point.
LoopFn reversed(LoopFn f) {
  return [f](double th) { return f(-th); };
}

LoopFn power(LoopFn f, int k) {
  return [f, k](double th) { return f(k * th); };
}

}  // namespace

TEST_CASE("quaternion group table") {
  const Q8 one = Q8::One, i = Q8::I, j = Q8::J, k = Q8::K, m1 = Q8::MinusOne;
  CHECK(q8_mul(i, i) == m1);
  CHECK(q8_mul(j, j) == m1);
  CHECK(q8_mul(k, k) == m1);
  CHECK(q8_mul(q8_mul(i, j), k) == m1);
  CHECK(q8_mul(i, j) == k);
  CHECK(q8_mul(j, i) == Q8::MinusK);
  for (Q8 a : q8_elements()) {
    CHECK(q8_mul(a, one) == a);
    CHECK(q8_mul(a, q8_inverse(a)) == one);
    for (Q8 b : q8_elements()) {
      for (Q8 c : q8_elements()) CHECK(q8_mul(q8_mul(a, b), c) == q8_mul(a, q8_mul(b, c)));
      // The table agrees with quaternion multiplication.
      double res = 1;
      CHECK(round_q8(to_quat(a) * to_quat(b), &res) == q8_mul(a, b));
      CHECK(res < 1e-15);
    }
  }
  CHECK(class_of(Q8::One) == ClassTag::H0);
  CHECK(class_of(Q8::MinusI) == ClassTag::H1);
  CHECK(class_of(Q8::J) == ClassTag::H2);
  CHECK(class_of(Q8::MinusK) == ClassTag::H3);
  CHECK(class_of(Q8::MinusOne) == ClassTag::H4);
}

TEST_CASE("rotation and quaternion conversions") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 1000; ++t) {
    const Quat q = test::random_quat(rng);
    const Mat3 r = rotation_matrix(q);
    CHECK(frobenius_norm(r * r.transposed() - Mat3::identity()) < 1e-13);
    const Quat back = quat_from_rotation(r);
    CHECK(std::min(quat_dist(back, q), quat_dist(back, -q)) < 1e-12);
  }
}

TEST_CASE("cover_project") {
  const auto& p = default_params();
  const QTensor base = vacuum_tensor({1, 0, 0}, {0, 1, 0}, p.r_star);
  CHECK(norm(cover_project({1, 0, 0, 0}, p).q - base) < 1e-14);
  CHECK(norm(cover_project({0, 1, 0, 0}, p).q - base) < 1e-14);
  for (Q8 g : q8_elements()) CHECK(norm(cover_project(to_quat(g), p).q - base) < 1e-14);

  std::mt19937_64 rng(32);
  for (int t = 0; t < 10000; ++t) {
    const Quat q = test::random_quat(rng);
    const ManifoldPoint a = cover_project(q, p), b = cover_project(-q, p);
    CHECK(norm(a.q - b.q) <= 1e-14);
    CHECK(norm_sq(a.q) == doctest::Approx(2 * p.r_star * p.r_star).epsilon(1e-10));
    CHECK(std::abs(trace_cube(a.q)) < 1e-10);
    CHECK(std::abs(dot(a.n, a.m)) < 1e-12);
    // Right translation by the group acts trivially.
    const Quat gq = q * to_quat(q8_elements()[t % 8]);
    CHECK(norm(cover_project(gq, p).q - a.q) < 1e-13);
  }

  CHECK_NOTHROW(cover_project({1 + 5e-7, 0, 0, 0}, p));
  CHECK_THROWS_AS(cover_project({1.1, 0, 0, 0}, p), Error);
}

TEST_CASE("frame_quat is a preimage") {
  const auto& p = default_params();
  std::mt19937_64 rng(33);
  for (int t = 0; t < 1000; ++t) {
    const ManifoldPoint x = test::random_point(rng, p);
    CHECK(norm(cover_project(frame_quat(x.n, x.m), p).q - x.q) < 1e-8);
  }
}

TEST_CASE("lift examples") {
  const auto& p = default_params();
  CHECK(lift_loop(sample_loop(loop_constant(p), 64), p).deck == Q8::One);
  const QuatPath a = lift_loop(sample_loop(loop_a0(p), 256), p);
  CHECK((a.deck == Q8::I || a.deck == Q8::MinusI));
  const QuatPath b = lift_loop(sample_loop(loop_b0(p), 256), p);
  CHECK((b.deck == Q8::J || b.deck == Q8::MinusJ));

  const NLoop l = sample_loop(loop_l2(p), 256);
  const QuatPath path = lift_loop(l, p);
  for (std::size_t i = 0; i < l.size(); ++i) {
    CHECK(path.q[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(cover_project(path.q[i], p).q - l.samples[i].q) < 1e-8);
  }

  CHECK_THROWS_AS(lift_loop(sample_loop(loop_a0(p), 8), p), Error);
  CHECK_THROWS_AS(lift_loop(sample_loop(loop_l3(p), 20), p), Error);
}

TEST_CASE("regression loop set classifies exactly") {
  const auto& p = default_params();
  for (const auto& c : test::regression_loops(p)) {
    CAPTURE(c.name);
    const HomotopyClass hc = classify(c.loop, p);
    CHECK(hc.tag == c.expected);
    CHECK(class_of(hc.deck) == hc.tag);
    if (hc.tag != ClassTag::H0) CHECK(hc.hpair == expected_hpair(hc.tag));
  }
}

TEST_CASE("classification invariances") {
  const auto& p = default_params();
  std::mt19937_64 rng(34);
  for (const auto& c : test::regression_loops(p)) {
    CAPTURE(c.name);
    const Q8 deck = lift_loop(c.loop, p).deck;
    for (int s = 0; s < 8; ++s) CHECK(conjugate(lift_loop(c.loop, p, s).deck, deck));
    CHECK(classify(shift_loop(c.loop, 77), p).tag == c.expected);
    CHECK(classify(rotate_loop(c.loop, test::random_rotation(rng)), p).tag == c.expected);
    const QuatPath rev = lift_loop(reverse_loop(c.loop), p);
    CHECK(conjugate(rev.deck, q8_inverse(deck)));
    CHECK(classify(reverse_loop(c.loop), p).tag == c.expected);
  }
  // Monotone reparametrization.
  for (ClassTag t : {ClassTag::H1, ClassTag::H2, ClassTag::H3, ClassTag::H4}) {
    const LoopFn f = representative(t, p);
    const NLoop warped = sample_loop([f](double th) { return f(th + 0.4 * std::sin(th)); }, 1024);
    CHECK(classify(warped, p).tag == t);
  }
}

TEST_CASE("swap acts on classes") {
  const auto& p = default_params();
  const ClassTag image[5] = {ClassTag::H0, ClassTag::H2, ClassTag::H1, ClassTag::H3, ClassTag::H4};
  for (int t = 0; t < 5; ++t) {
    const NLoop l = sample_loop(representative(ClassTag(t), p), 512);
    CHECK(classify(swap_loop(l), p).tag == image[t]);
    const NLoop twice = swap_loop(swap_loop(l));
    for (std::size_t i = 0; i < l.size(); ++i) CHECK(twice.samples[i].q == l.samples[i].q);
  }
}

TEST_CASE("concatenation composes deck elements") {
  const auto& p = default_params();
  const LoopFn a = loop_a0(p), b = loop_b0(p);
  const std::vector<LoopFn> reps = {loop_constant(p), power(a, 2), a,           reversed(a),
                                    b,                reversed(b), concat(a, b), concat(reversed(b), reversed(a))};
  std::vector<Q8> decks;
  std::vector<double> energies;
  for (const auto& f : reps) {
    const NLoop l = sample_loop(f, 1024);
    decks.push_back(lift_loop(l, p).deck);
    energies.push_back(loop_energy(l));
  }
  // The eight loops realize all eight group elements.
  for (Q8 g : q8_elements()) CHECK(std::count(decks.begin(), decks.end(), g) == 1);

  for (std::size_t x = 0; x < reps.size(); ++x)
    for (std::size_t y = 0; y < reps.size(); ++y) {
      const NLoop l = sample_loop(concat(reps[x], reps[y]), 2048);
      const HomotopyClass hc = classify(l, p);
      CHECK(hc.tag == class_of(q8_mul(decks[x], decks[y])));
      const ClassTag tx = class_of(decks[x]), ty = class_of(decks[y]);
      CHECK(e_star(hc.tag, p) <= e_star(tx, p) + e_star(ty, p) + 1e-12);
    }
}

TEST_CASE("z2 class of direction loops") {
  std::vector<Vec3> half, full, flat;
  for (int i = 0; i < 64; ++i) {
    const double th = 2 * std::numbers::pi * i / 64;
    half.push_back({std::cos(th / 2), std::sin(th / 2), 0});
    full.push_back({std::cos(th), std::sin(th), 0});
    flat.push_back({0, 0, 1});
  }
  CHECK(z2_class(half) == 1);
  CHECK(z2_class(full) == 0);
  CHECK(z2_class(flat) == 0);
}

TEST_CASE("loop energies of representatives") {
  for (const auto& p : {derive_params(6, 1, 1, 1), derive_params(2, 2, 4, 1)}) {
    const double k = p.kappa_star;
    CHECK(k == doctest::Approx(std::numbers::pi / 2 * p.r_star * p.r_star));
    CHECK(loop_energy(sample_loop(loop_constant(p), 64)) == 0.0);
    const double expected[5] = {0, k, k, 4 * k, 4 * k};
    for (int t = 1; t < 5; ++t) {
      const LoopFn f = representative(ClassTag(t), p);
      const double e = loop_energy(sample_loop(f, 4096));
      CHECK(e == doctest::Approx(expected[t]).epsilon(1e-5));
      // Second-order convergence in the number of samples.
      const double e1 = loop_energy(sample_loop(f, 64)), e2 = loop_energy(sample_loop(f, 128));
      const double ratio = (expected[t] - e1) / (expected[t] - e2);
      CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
    }
  }
}

TEST_CASE("class energy table") {
  const auto& p = default_params();
  const double k = std::numbers::pi / 2;
  const auto t = class_energies(p);
  CHECK(t[0].e_star == 0.0);
  CHECK(t[1].e_lower == doctest::Approx(k));
  CHECK(t[2].e_star == doctest::Approx(k));
  CHECK(!t[3].exact);
  CHECK(t[3].e_lower == doctest::Approx(2 * k));
  CHECK(t[3].e_upper == doctest::Approx(4 * k));
  CHECK(t[3].e_star == doctest::Approx(2 * k));
  CHECK(t[4].e_lower == doctest::Approx(4 * k));
  CHECK(e_star(ClassTag::H4, p) == doctest::Approx(std::numbers::pi));

  // Every representative carries at least the minimal energy of its class.
  for (const auto& c : test::regression_loops(p, 1024))
    CHECK(loop_energy(c.loop) >= e_star(classify(c.loop, p).tag, p) - 1e-4);
}

TEST_CASE("relaxed H3 loop energy lies strictly between 2 and 4 kappa") {
  const auto& p = default_params();
  const std::size_t n = 128;
  std::mt19937_64 rng(35);
  std::vector<QTensor> start;
  const LoopFn l2 = loop_l2(p);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2 * std::numbers::pi * i / n;
    start.push_back(l2(th).q + 0.05 * std::sin(th) * test::random_tensor(rng, 0.2));
  }
  const NLoop init = make_loop(start, p);
  REQUIRE(classify(init, p).tag == ClassTag::H3);
  const double d = 2 * std::numbers::pi / n;
  const NLoop relaxed = relax_loop(init, p, 20000, 0.4 * d * d);
  CHECK(classify(relaxed, p).tag == ClassTag::H3);
  const double e = loop_energy(relaxed);
  CHECK(e < loop_energy(init));
  CHECK(e > 2 * p.kappa_star);
  CHECK(e < 4 * p.kappa_star);
  MESSAGE("relaxed H3 loop energy / kappa* = " << e / p.kappa_star);
}
