#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace cforge {

using Rational = mpq_class;

/// Parses "n", "-n" or "n/d"; throws ParseError otherwise.
Rational parse_rational(const std::string& text);

/// Canonical "num/den" form, always with an explicit denominator.
std::string format_rational(const Rational& q);

double to_double(const Rational& q);

/// Half-open interval [lo, hi).
struct Interval {
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  bool empty() const { return hi <= lo; }
  bool contains(const Rational& x) const { return lo <= x && x < hi; }
  friend bool operator==(const Interval& x, const Interval& y) { return x.lo == y.lo && x.hi == y.hi; }
};

/// Finite disjoint union of half-open rational intervals, kept sorted and merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts);
  static IntervalSet unit() { return IntervalSet({{Rational(0), Rational(1)}}); }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  Rational measure() const;
  bool contains(const Rational& x) const;

  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet subtract(const IntervalSet& other) const;
  IntervalSet translate(const Rational& shift) const;
  /// Complement inside [0, 1).
  IntervalSet complement() const { return unit().subtract(*this); }
  bool subset_of(const IntervalSet& other) const { return subtract(other).empty(); }
  bool disjoint_from(const IntervalSet& other) const { return intersect(other).empty(); }

  /// Order-preserving cut: the part of measure in [from, to) counted from the left.
  IntervalSet slice_by_measure(const Rational& from, const Rational& to) const;

  friend bool operator==(const IntervalSet& x, const IntervalSet& y) { return x.parts_ == y.parts_; }

 private:
  std::vector<Interval> parts_;
};

}  // namespace cforge
