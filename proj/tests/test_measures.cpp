#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cforge/errors.hpp"
#include "cforge/measures.hpp"

using namespace cforge;

namespace {

Rational q(long n, long d) { return Rational(n) / Rational(d); }

const Mat2 kR = Mat2::rotation(kPi / 2);
const Mat2 kH = Mat2::diag(2);

double oracle_dist(const Mat2& x, const Mat2& y) {
  return oracle::norm({x.a() - y.a(), x.b() - y.b(), x.c() - y.c(), x.d() - y.d()});
}

bool has_atom(const AtomicMeasureG& nu, const Mat2& m, const Rational& w) {
  for (const auto& a : nu.atoms())
    if (a.matrix.distance(m) <= 1e-10 && a.weight == w) return true;
  return false;
}

}  // namespace

TEST_CASE("pushforward of step cocycles") {
  const auto c = pushforward(StepCocycle::constant(kH));
  CHECK(c.size() == 1);
  CHECK(c.total_mass() == 1);
  const auto m = pushforward(StepCocycle({{Rational(0), q(1, 2), kH}, {q(1, 2), Rational(1), kH}}));
  CHECK(m.size() == 1);
  const auto two = pushforward(StepCocycle({{Rational(0), q(1, 4), kR}, {q(1, 4), Rational(1), kH}}));
  CHECK(two.size() == 2);
  CHECK(has_atom(two, kR, q(1, 4)));
  CHECK(has_atom(two, kH, q(3, 4)));
}

TEST_CASE("convolution powers") {
  const auto nu = AtomicMeasureG({{kR, q(1, 2)}, {kH, q(1, 2)}});
  CHECK(convolve_power(nu, 1).atoms().size() == nu.atoms().size());
  const auto d = convolve_power(AtomicMeasureG::dirac(kH), 5);
  CHECK(d.size() == 1);
  CHECK(d.atoms()[0].matrix.distance(power(kH, 5)) < 1e-12);
  const auto n2 = convolve_power(nu, 2);
  CHECK(n2.size() == 4);
  for (const Mat2& m : {kR * kR, kH * kR, kR * kH, kH * kH}) CHECK(has_atom(n2, m, q(1, 4)));
  CHECK(n2.total_mass() == 1);
  CHECK_THROWS_AS(convolve_power(nu, 30, 1000), Error);
  CHECK_THROWS_AS(convolve_power(nu.scaled(q(1, 2)), 2), Error);
  const auto scaled = convolve_power(nu, 2, kDefaultAtomCap, q(1, 3));
  CHECK(scaled.total_mass() == q(1, 3));
}

TEST_CASE("convolution order matches orbit products") {
  // Over the swap of two halves, the orbit of x in [0,1/2) reads A then B.
  const Mat2 a = Mat2::upper(2, 1), b = Mat2::rotation(0.7);
  const StepCocycle c({{Rational(0), q(1, 2), a}, {q(1, 2), Rational(1), b}});
  const Mat2 orbit = orbit_product(c, Iet::rotation(q(1, 2)), Rational(0), 2);
  const auto nu = convolve_power(pushforward(c), 2);
  CHECK(has_atom(nu, orbit, q(1, 4)));
  CHECK(orbit.distance(b * a) < 1e-12);
}

TEST_CASE("inverse measures") {
  const auto nu = AtomicMeasureG({{kH, q(1, 3)}, {Mat2::upper(2, 1), q(2, 3)}});
  const auto inv = inverse_measure(nu);
  CHECK(has_atom(inv, Mat2::diag(0.5), q(1, 3)));
  CHECK(has_atom(inv, Mat2(0.5, -1, 0, 2), q(2, 3)));
  const auto back = inverse_measure(inv);
  for (const auto& at : nu.atoms()) CHECK(has_atom(back, at.matrix, at.weight));
  CHECK(has_atom(inverse_measure(AtomicMeasureG::dirac(kR)), kR.inverse(), Rational(1)));
}

TEST_CASE("direction pushforward") {
  const auto h = direction_pushforward(AtomicMeasureG::dirac(Mat2::rotation(1.0)), ProjDir(0.0), 32);
  CHECK(h.mass[static_cast<std::size_t>(1.0 / h.bin_width())] == doctest::Approx(1.0));
  const auto id = direction_pushforward(AtomicMeasureG::dirac(Mat2()), ProjDir(2.0), 32);
  CHECK(id.mass[static_cast<std::size_t>(2.0 / id.bin_width())] == doctest::Approx(1.0));
  const auto fam = MatrixFamily::sample([](double t) { return Mat2::rotation(kPi * t); }, 64);
  const auto u = direction_pushforward(fam.empirical(), ProjDir(kPi / 128), 16);
  for (double m : u.mass) CHECK(m == doctest::Approx(1.0 / 16));
  CHECK(u.total() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("richness kappa") {
  const auto single = MatrixFamily::sample([](double) { return kH; }, 16);
  CHECK(richness_kappa(single, 1, 8, 32).kappa_fwd == 0.0);
  const auto rot = MatrixFamily::sample([](double t) { return Mat2::rotation(kPi * t); }, 256);
  const auto k = richness_kappa(rot, 1, 16, 64);
  CHECK(std::abs(k.kappa_fwd - 1 / kPi) < 0.1 / kPi);
  CHECK(std::abs(k.kappa_inv - 1 / kPi) < 0.1 / kPi);
  // Elliptic members with a moving parameter: rich at N = 2.
  const auto fam = MatrixFamily::sample([](double t) { return Mat2::rotation(kPi / 4 + 2 * t) * Mat2::diag(1.2); }, 64);
  CHECK(richness_kappa(fam, 2, 8, 16).kappa_fwd > 0.0);
}

TEST_CASE("richness criterion") {
  const auto c = richness_criterion(MatrixFamily::sample([](double) { return kH; }, 16));
  CHECK_FALSE(c.nonconstant);
  const auto r = richness_criterion(MatrixFamily::sample([](double t) { return Mat2::rotation(kPi / 4 + t / 10); }, 32));
  REQUIRE(r.elliptic_word);
  CHECK(r.elliptic_word->size() == 1);
  CHECK(r.nonconstant);
  CHECK_FALSE(r.trace_locally_constant);
  // Conjugates of one rotation: trace constant, doubled trace varies.
  const auto l = richness_criterion(MatrixFamily::sample(
      [](double t) {
        const Mat2 lt = Mat2::upper(1 + t, t);
        return lt * Mat2::rotation(kPi / 4) * lt.inverse();
      },
      32));
  CHECK(l.trace_locally_constant);
  CHECK(l.doubled_trace_nonconstant);
  CHECK(l.nonconstant);
}

TEST_CASE("measure distance") {
  const auto nu = AtomicMeasureG({{kR, q(1, 2)}, {kH, q(1, 2)}});
  CHECK(measure_distance(nu, nu) == 0.0);
  const Mat2 a = Mat2::upper(1.5, 0.2);
  CHECK(measure_distance(AtomicMeasureG::dirac(kH), AtomicMeasureG::dirac(a)) ==
        doctest::Approx(oracle_dist(kH, a)).epsilon(1e-12));
  const Mat2 b = Mat2::rotation(0.1), c = Mat2::upper(1.1, 0.0), d = Mat2::rotation(1.0);
  const auto x = AtomicMeasureG({{a, q(1, 2)}, {b, q(1, 2)}});
  const auto y = AtomicMeasureG({{c, q(1, 2)}, {d, q(1, 2)}});
  const double straight = 0.5 * (oracle_dist(a, c) + oracle_dist(b, d));
  const double crossed = 0.5 * (oracle_dist(a, d) + oracle_dist(b, c));
  CHECK(measure_distance(x, y) == doctest::Approx(std::min(straight, crossed)).epsilon(1e-12));
  CHECK_THROWS_AS(measure_distance(nu, AtomicMeasureG::dirac(kH, q(1, 3))), Error);
}

TEST_CASE("property: mass conservation and metric axioms") {
  std::mt19937_64 rng(51);
  auto random_measure = [&](int atoms) {
    std::vector<Atom> xs;
    for (int i = 0; i < atoms; ++i) {
      const auto m = oracle::random_sl2(rng, 2.0);
      xs.push_back({Mat2(m[0], m[1], m[2], m[3]), q(1, atoms)});
    }
    return AtomicMeasureG(xs);
  };
  std::uniform_real_distribution<double> ang(0.0, kPi);
  for (int trial = 0; trial < 60; ++trial) {
    const auto x = random_measure(3), y = random_measure(3), z = random_measure(3);
    CHECK(convolve_power(x, 3).total_mass() == 1);
    CHECK(direction_pushforward(x, ProjDir(ang(rng)), 37).total() == doctest::Approx(1.0).epsilon(1e-10));
    const double xy = measure_distance(x, y), yz = measure_distance(y, z), xz = measure_distance(x, z);
    CHECK(xy >= 0);
    CHECK(xy == doctest::Approx(measure_distance(y, x)).epsilon(1e-12));
    CHECK(xz <= xy + yz + 1e-12);
    CHECK(measure_distance(x, x) == 0.0);
  }
}
