#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cforge/errors.hpp"
#include "cforge/hyperbolicity.hpp"

using namespace cforge;

namespace {

Mat2 from(const oracle::M& m) { return Mat2(m[0], m[1], m[2], m[3]); }

// Independent exhaustive scan in (length, lexicographic) order with the
// latest letter leftmost; returns the first word with norm <= lambda^n.
std::optional<Word> brute_violation(const std::vector<Mat2>& sigma, int depth, double lambda) {
  for (int n = 1; n <= depth; ++n) {
    Word w(static_cast<std::size_t>(n), 0);
    while (true) {
      oracle::M p{1, 0, 0, 1};
      for (auto i : w) p = oracle::mul({sigma[i].a(), sigma[i].b(), sigma[i].c(), sigma[i].d()}, p);
      if (oracle::norm(p) <= std::pow(lambda, n)) return w;
      int k = n - 1;
      while (k >= 0 && w[static_cast<std::size_t>(k)] + 1 == sigma.size()) w[static_cast<std::size_t>(k--)] = 0;
      if (k < 0) break;
      ++w[static_cast<std::size_t>(k)];
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("word scan examples") {
  const auto h = word_scan({Mat2::diag(2)}, 12, 1.9);
  CHECK(h.status == UhStatus::Undecided);
  CHECK(h.depth_reached == 12);
  const auto r = word_scan({Mat2::diag(2), Mat2::rotation(1.0)}, 1, 1.1);
  CHECK(r.status == UhStatus::CounterexampleWord);
  CHECK(r.witness == Word{1});
  CHECK_THROWS_AS(word_scan({Mat2::diag(2), Mat2::diag(3)}, 30, 1.1, 1 << 20), Error);
}

TEST_CASE("word scan agrees with a brute-force scan near the boundary") {
  const Mat2 h = Mat2::diag(2);
  for (double t : {0.3, 0.6, 0.9, 1.2, 1.5}) {
    const std::vector<Mat2> sigma{h, Mat2::rotation(kPi / 2) * Mat2::rotation(t) * h * Mat2::rotation(-t)};
    const auto v = word_scan(sigma, 8, 1.05);
    const auto b = brute_violation(sigma, 8, 1.05);
    CHECK((v.status == UhStatus::CounterexampleWord) == b.has_value());
    if (b) CHECK(v.witness == *b);
  }
}

TEST_CASE("word scan is thread-count independent") {
  const std::vector<Mat2> sigma{Mat2::diag(2), Mat2::rotation(0.4) * Mat2::diag(1.5), Mat2::upper(1.2, 0.3)};
  const auto one = word_scan(sigma, 7, 1.2, kDefaultWordBudget, 1);
  const auto four = word_scan(sigma, 7, 1.2, kDefaultWordBudget, 4);
  CHECK(one.status == four.status);
  CHECK(one.witness == four.witness);
}

TEST_CASE("interval certificates") {
  const auto d = interval_certificate({Mat2::diag(2)}, 64);
  REQUIRE(d);
  CHECK(d->lambda > 1);
  CHECK(verify_certificate({Mat2::diag(2)}, d->family));
  CHECK_FALSE(interval_certificate({Mat2::rotation(kPi / 3)}, 64));
  CHECK_FALSE(interval_certificate({Mat2::rotation(kPi / 3)}, 256));
  const Mat2 l(1, 1, 0, 1);
  const std::vector<Mat2> sigma{Mat2::diag(3), l * Mat2::diag(3) * l.inverse()};
  const auto c = interval_certificate(sigma, 256);
  REQUIRE(c);
  CHECK(verify_certificate(sigma, c->family));
  CHECK_FALSE(brute_violation(sigma, 10, 1.0));
}

TEST_CASE("addendum cases") {
  const auto p = addendum_classify(StepCocycle::constant(Mat2(1, 1, 0, 1)), 64);
  CHECK(p.tag == AddendumTag::i1);
  REQUIRE(p.direction);
  CHECK(angle_distance(p.direction->angle(), 0.0) < 1e-9);
  CHECK(p.lambda0 == doctest::Approx(0.0));
  const auto h = addendum_classify(StepCocycle::constant(Mat2::diag(2)), 64);
  CHECK(h.tag == AddendumTag::i1);
  CHECK(h.lambda0 == doctest::Approx(std::log(2.0)));
  // Two strictly contracting atoms on a shared cone around 0.
  const Mat2 a = Mat2::diag(2), b = Mat2::rotation(0.1) * Mat2::diag(3) * Mat2::rotation(-0.1);
  const StepCocycle two({{Rational(0), Rational(1) / Rational(2), a}, {Rational(1) / Rational(2), Rational(1), b}});
  const auto s = addendum_classify(two, 128);
  CHECK(s.tag == AddendumTag::i23);
  REQUIRE(s.interval);
  for (const Mat2& m : {a, b}) {
    CHECK(s.interval->contains_strictly(act(m, ProjDir(s.interval->start)).angle()));
    CHECK(s.interval->contains_strictly(act(m, ProjDir(s.interval->end())).angle()));
  }
  CHECK(interval_certificate({a, b}, 128));
}

TEST_CASE("fixed directions") {
  const auto f = fixed_directions(Mat2::diag(2));
  CHECK(f.angles.size() == 2);
  CHECK(fixed_directions(Mat2()).all);
  CHECK(fixed_directions(Mat2::rotation(1.0)).angles.empty());
}

TEST_CASE("elliptic words in the semigroup") {
  const auto r = elliptic_in_semigroup({Mat2::diag(2), Mat2::rotation(kPi / 3)}, 4);
  REQUIRE(r);
  CHECK(*r == Word{1});
  CHECK_FALSE(elliptic_in_semigroup({Mat2::diag(2)}, 8));
  // B is hyperbolic and sends e^u(H) to e^s(H), so tr(H^n B) tends to 0.
  const Mat2 h = Mat2::diag(4);
  const std::vector<Mat2> sigma{h, Mat2(0.0, -0.25, 4.0, 0.0) * Mat2::upper(1.0, 3.0)};
  REQUIRE(classify(sigma[1]) == MatClass::Hyperbolic);
  REQUIRE(angle_distance(act(sigma[1], ProjDir(0.0)), ProjDir(kPi / 2)) < 1e-12);
  const auto w = elliptic_in_semigroup(sigma, 6);
  REQUIRE(w);
  CHECK(std::abs(word_product(sigma, *w).trace()) < 2 - kTolBoundary);
}

TEST_CASE("property: refutations and certificates are sound and consistent") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<Mat2> sigma{from(oracle::random_sl2(rng, 3.0)), from(oracle::random_sl2(rng, 3.0))};
    const auto v = word_scan(sigma, 8, 1.0001);
    if (v.status == UhStatus::CounterexampleWord)
      CHECK(word_product(sigma, v.witness).norm() <= std::pow(1.0001, static_cast<double>(v.witness.size())) * (1 + 1e-12));
    const auto c = interval_certificate(sigma, 64);
    if (c) {
      CHECK(c->lambda > 1);
      CHECK(verify_certificate(sigma, c->family));
      CHECK(v.status != UhStatus::CounterexampleWord);
    }
    const auto e = elliptic_in_semigroup(sigma, 6);
    if (e) {
      CHECK(std::abs(word_product(sigma, *e).trace()) < 2 - kTolBoundary);
      CHECK_FALSE(c);
    }
  }
}
