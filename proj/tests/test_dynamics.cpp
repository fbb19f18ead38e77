#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"

#include "cforge/dynamics.hpp"
#include "cforge/errors.hpp"

using namespace cforge;

namespace {

Rational q(long n, long d) { return Rational(n) / Rational(d); }

// Linear scan over the pieces, independent of the library's lookup.
Rational eval(const Iet& t, const Rational& x) {
  for (const auto& p : t.pieces())
    if (p.lo <= x && x < p.hi) return x + p.shift;
  FAIL("point outside [0,1)");
  return Rational(0);
}

std::vector<std::size_t> random_perm(std::mt19937_64& rng, std::size_t m) {
  std::vector<std::size_t> s(m);
  for (std::size_t i = 0; i < m; ++i) s[i] = i;
  std::shuffle(s.begin(), s.end(), rng);
  return s;
}

Iet random_iet(std::mt19937_64& rng, std::size_t max_rank) {
  const std::size_t m = 1 + rng() % max_rank;
  return iet_from_permutation(m, random_perm(rng, m)).map;
}

std::multiset<Rational> lengths(const std::vector<Interval>& xs) {
  std::multiset<Rational> out;
  for (const auto& x : xs) out.insert(x.hi - x.lo);
  return out;
}

}  // namespace

TEST_CASE("interval permutations") {
  const auto id = iet_from_permutation(4, {0, 1, 2, 3});
  CHECK(id.map == Iet::identity());
  CHECK_FALSE(id.is_cyclic);
  const auto rot = iet_from_permutation(4, {1, 2, 3, 0});
  CHECK(rot.map == Iet::rotation(q(1, 4)));
  CHECK(rot.is_cyclic);
  const auto inv = iet_from_permutation(4, {1, 0, 3, 2});
  CHECK_FALSE(inv.is_cyclic);
  CHECK(compose(inv.map, inv.map) == Iet::identity());
  CHECK_THROWS_AS(iet_from_permutation(3, {0, 0, 1}), Error);
}

TEST_CASE("composition and inversion") {
  const Iet t = iet_from_permutation(4, {2, 0, 3, 1}).map;
  CHECK(compose(t, Iet::identity()) == t);
  CHECK(invert(Iet::rotation(q(1, 4))) == Iet::rotation(q(3, 4)));
  CHECK(compose(t, invert(t)) == Iet::identity());
  const Iet s = iet_from_permutation(4, {1, 3, 0, 2}).map;
  const Iet st = compose(s, t);
  CHECK(st.pieces().size() <= 16);
  for (long i = 0; i < 64; ++i) CHECK(eval(st, q(i, 64)) == eval(s, eval(t, q(i, 64))));
}

TEST_CASE("weak distance examples") {
  const Iet t = iet_from_permutation(5, {3, 0, 4, 1, 2}).map;
  CHECK(weak_distance(t, t) == 0);
  CHECK(weak_distance(Iet::identity(), Iet::rotation(q(1, 2))) == q(1, 2));
  // Displacement 1/8 on half the space: crossing at 1/8.
  const Iet swap = iet_from_permutation(8, {1, 0, 3, 2, 4, 5, 6, 7}).map;
  CHECK(weak_distance(swap, Iet::identity()) == q(1, 8));
}

TEST_CASE("first return examples") {
  const Iet t = iet_from_permutation(8, {1, 2, 0, 4, 5, 6, 7, 3}).map;
  {
    const auto fr = first_return(t, IntervalSet::unit());
    CHECK(fr.map == t);
    CHECK(fr.saturation == IntervalSet::unit());
    for (const auto& p : fr.return_time.parts) CHECK(p.value == 1);
  }
  {
    const Iet rot = Iet::rotation(q(1, 6));
    const auto fr = first_return(rot, IntervalSet({{Rational(0), q(1, 6)}}));
    CHECK(fr.map == Iet::identity());
    for (const auto& p : fr.return_time.parts) CHECK(p.value == 6);
    CHECK(fr.return_time.integral_rational() == 1);
  }
  {
    // Orbit enumeration oracle: cells 0 and 3 see return times 3 and 5.
    const IntervalSet w({{Rational(0), q(1, 8)}, {q(3, 8), q(4, 8)}});
    const auto fr = first_return(t, w);
    std::map<Rational, std::int64_t> times;
    for (const auto& p : fr.return_time.parts) times[p.lo] = p.value;
    CHECK(times.at(Rational(0)) == 3);
    CHECK(times.at(q(3, 8)) == 5);
    CHECK(fr.return_time.integral_rational() == 1);
    CHECK(fr.saturation == IntervalSet::unit());
  }
}

TEST_CASE("cyclic towers") {
  CHECK(cyclic_towers(Iet::rotation(q(1, 8)), 8).size() == 1);
  CHECK(cyclic_towers(Iet::rotation(q(1, 8)), 8).front().height == 8);
  const auto ids = cyclic_towers(Iet::identity(), 4);
  CHECK(ids.size() == 4);
  for (const auto& tw : ids) CHECK(tw.height == 1);
  const Iet t = iet_from_permutation(8, {1, 2, 0, 4, 5, 6, 7, 3}).map;
  auto tws = cyclic_towers(t, 8);
  REQUIRE(tws.size() == 2);
  std::sort(tws.begin(), tws.end(), [](const Tower& x, const Tower& y) { return x.height < y.height; });
  CHECK(tws[0].height == 3);
  CHECK(tws[1].height == 5);
  CHECK(tws[0].base.measure() == q(1, 8));
  CHECK(tws[1].base.measure() == q(1, 8));
  CHECK_THROWS_AS(cyclic_towers(Iet::rotation(q(1, 3)), 4), Error);
}

TEST_CASE("minimal rank and interval permutation view") {
  CHECK(minimal_rank(Iet::rotation(q(3, 10))) == 10);
  CHECK(minimal_rank(Iet::identity()) == 1);
  const auto rp = as_interval_permutation(Iet::rotation(q(1, 4)), 8);
  CHECK(rp.is_cyclic == false);
  CHECK(as_interval_permutation(Iet::rotation(q(1, 8)), 8).is_cyclic);
}

TEST_CASE("transport and partial maps") {
  const IntervalSet from({{Rational(0), q(1, 4)}});
  const IntervalSet to({{q(1, 2), q(5, 8)}, {q(7, 8), Rational(1)}});
  auto pieces = transport(from, to);
  auto back = transport(to, from);
  pieces.insert(pieces.end(), back.begin(), back.end());
  const Iet s = from_partial(pieces);
  CHECK(s.image(from) == to);
  CHECK(compose(s, s) == Iet::identity());
}

TEST_CASE("property: measure preservation and group laws") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const Iet a = random_iet(rng, 12), b = random_iet(rng, 12), c = random_iet(rng, 12);
    for (const Iet& t : {a, compose(a, b)}) {
      std::vector<Interval> dom, img;
      for (const auto& p : t.pieces()) {
        dom.push_back({p.lo, p.hi});
        img.push_back({p.lo + p.shift, p.hi + p.shift});
      }
      CHECK(lengths(dom) == lengths(img));
      CHECK(IntervalSet(img) == IntervalSet::unit());
    }
    CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
    CHECK(invert(invert(a)) == a);
    CHECK(compose(a, invert(a)) == Iet::identity());
  }
}

TEST_CASE("property: weak distance is a metric") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const Iet a = random_iet(rng, 10), b = random_iet(rng, 10), c = random_iet(rng, 10);
    const Rational ab = weak_distance(a, b), bc = weak_distance(b, c), ac = weak_distance(a, c);
    CHECK(ab >= 0);
    CHECK(ab == weak_distance(b, a));
    CHECK(ac <= ab + bc);
    CHECK((ab == 0) == (a == b));
  }
}

TEST_CASE("property: Kac identity and tower disjointness") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng() % 16;
    const Iet t = iet_from_permutation(m, random_perm(rng, m)).map;
    std::vector<Interval> parts;
    for (std::size_t j = 0; j < m; ++j)
      if (rng() % 3 == 0) parts.push_back({q(static_cast<long>(j), static_cast<long>(m)), q(static_cast<long>(2 * j + 1), static_cast<long>(2 * m))});
    if (parts.empty()) parts.push_back({Rational(0), q(1, static_cast<long>(m))});
    const IntervalSet w(parts);
    const auto fr = first_return(t, w);
    Rational kac(0);
    for (const auto& p : fr.return_time.parts) kac += (p.hi - p.lo) * Rational(static_cast<long>(p.value));
    CHECK(kac == fr.saturation.measure());
    CHECK(fr.map.image(w) == w);
    const auto tws = cyclic_towers(t, m);
    IntervalSet all;
    Rational total(0);
    for (const auto& tw : tws) {
      for (std::size_t i = 0; i < tw.levels.size(); ++i) {
        CHECK(all.disjoint_from(tw.levels[i]));
        all = all.unite(tw.levels[i]);
        total += tw.levels[i].measure();
        CHECK(t.image(tw.levels[i]) == tw.levels[(i + 1) % tw.levels.size()]);
      }
    }
    CHECK(all == IntervalSet::unit());
    CHECK(total == 1);
  }
}
