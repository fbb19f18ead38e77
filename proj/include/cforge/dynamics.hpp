#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

#include "cforge/rational.hpp"

namespace cforge {

/// Default cap on piece-steps for orbit walks.
inline constexpr std::size_t kDefaultIterationCap = 1000000;

/// Translation x -> x + shift on [lo, hi).
struct Piece {
  Rational lo;
  Rational hi;
  Rational shift;
};

/// Measure-preserving bijection of [0,1) translating finitely many rational intervals.
class Iet {
 public:
  /// Identity.
  Iet();
  /// Validates that the domains and the images both partition [0,1); merges
  /// adjacent pieces with equal shift.
  explicit Iet(std::vector<Piece> pieces);

  static Iet identity() { return Iet(); }
  /// x -> x + r mod 1.
  static Iet rotation(const Rational& r);
  /// Builds from left endpoints and shifts.
  static Iet from_breakpoints(const std::vector<Rational>& breakpoints, const std::vector<Rational>& offsets);

  const std::vector<Piece>& pieces() const { return pieces_; }
  std::vector<Rational> breakpoints() const;
  std::vector<Rational> offsets() const;

  Rational operator()(const Rational& x) const;
  const Piece& piece_at(const Rational& x) const;
  std::size_t piece_index(const Rational& x) const;

  IntervalSet image(const IntervalSet& set) const;
  IntervalSet preimage(const IntervalSet& set) const;

  friend bool operator==(const Iet& x, const Iet& y);

 private:
  std::vector<Piece> pieces_;
};

/// S o T.
Iet compose(const Iet& s, const Iet& t);
Iet invert(const Iet& t);
/// T^n for n >= 0.
Iet iterate(const Iet& t, std::int64_t n);

/// Interval permutation of rank M, sigma(j) = index of the image of [j/M, (j+1)/M).
struct RankedPermutation {
  Iet map;
  std::size_t rank = 0;
  std::vector<std::size_t> sigma;
  bool is_cyclic = false;
};

bool is_cyclic_permutation(const std::vector<std::size_t>& sigma);
RankedPermutation iet_from_permutation(std::size_t M, const std::vector<std::size_t>& sigma);
/// Reads T as a rank-M interval permutation; throws NotIntervalPermutation.
RankedPermutation as_interval_permutation(const Iet& t, std::size_t M);
/// Least M for which T is a rank-M interval permutation.
std::size_t minimal_rank(const Iet& t);

Rational weak_distance(const Iet& s, const Iet& t);

template <class V>
struct StepFunction {
  struct Part {
    Rational lo;
    Rational hi;
    V value;
  };
  std::vector<Part> parts;

  Rational integral_rational() const
    requires std::is_integral_v<V>
  {
    Rational s(0);
    for (const auto& p : parts) s += (p.hi - p.lo) * Rational(static_cast<long>(p.value));
    return s;
  }
};

/// One piece of an induced map: points of [lo, hi) return to W after `time`
/// steps, translated by `shift`.
struct ReturnPiece {
  Rational lo;
  Rational hi;
  Rational shift;
  std::int64_t time;
};

struct FirstReturn {
  Iet map;  ///< T_W on W, identity off W
  StepFunction<std::int64_t> return_time;
  IntervalSet saturation;
  std::vector<ReturnPiece> pieces;
};

/// First-return map to W. Pieces are additionally split so that every
/// visited position lies inside one cell of `refine` (sorted breakpoints).
FirstReturn first_return(const Iet& t, const IntervalSet& w, std::size_t cap = kDefaultIterationCap,
                         const std::vector<Rational>* refine = nullptr);

struct Tower {
  IntervalSet base;
  std::size_t height = 0;
  std::vector<IntervalSet> levels;
};

std::vector<Tower> cyclic_towers(const Iet& t, std::size_t M);
/// Walks the images of `base` until they return onto it with trivial shift.
Tower tower_from_base(const Iet& t, const IntervalSet& base, std::size_t max_height = kDefaultIterationCap);
/// Levels disjoint, consecutive levels mapped onto each other, and T^h = id on the base.
bool is_cyclic_tower(const Iet& t, const Tower& tower);
IntervalSet tower_support(const Tower& tower);

/// Order-preserving translation pieces carrying `from` onto `to` (equal measure).
std::vector<Piece> transport(const IntervalSet& from, const IntervalSet& to);

/// Identity off the domains of `pieces`; the pieces must permute their union.
Iet from_partial(const std::vector<Piece>& pieces);

}  // namespace cforge
