#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cforge/dynamics.hpp"
#include "cforge/rational.hpp"
#include "cforge/sl2.hpp"

namespace cforge {

/// Default cap on refinement pieces for exact integrals.
inline constexpr std::size_t kDefaultPieceCap = 1000000;

struct CocyclePiece {
  Rational lo;
  Rational hi;
  Mat2 matrix;
};

/// Piecewise constant map [0,1) -> SL(2,R) on a finite rational partition.
class StepCocycle {
 public:
  /// Constant identity.
  StepCocycle();
  /// Validates that the pieces partition [0,1). Pieces are kept as given.
  explicit StepCocycle(std::vector<CocyclePiece> pieces);

  static StepCocycle constant(const Mat2& m);
  /// M equal cells [j/M, (j+1)/M) carrying cells[j].
  static StepCocycle uniform(const std::vector<Mat2>& cells);

  const std::vector<CocyclePiece>& pieces() const { return pieces_; }
  std::vector<Rational> breakpoints() const;
  /// Max piece norm, the constant C.
  double sup_norm() const { return sup_norm_; }

  std::size_t piece_index(const Rational& x) const;
  const Mat2& operator()(const Rational& x) const { return pieces_[piece_index(x)].matrix; }

  /// Adjacent pieces carrying identical matrices merged.
  StepCocycle merged() const;

 private:
  std::vector<CocyclePiece> pieces_;
  double sup_norm_ = 1.0;
};

/// x -> A(S(x)).
StepCocycle precompose(const StepCocycle& a, const Iet& s);

enum class ExponentKind { ExactPeriodic, LambdaK, InfEstimate };
const char* exponent_kind_name(ExponentKind kind);

/// One cyclic tower: base measure times height is its mass.
struct TowerContribution {
  Rational base_measure;
  std::int64_t height;
  double trace;
  double contribution;
};

struct ExponentReport {
  double value = 0.0;
  ExponentKind kind = ExponentKind::LambdaK;
  std::int64_t order = 0;  ///< k for Lambda_k, the minimizing N for inf-estimates, 0 otherwise
  std::vector<TowerContribution> towers;
};

/// A(T^{n-1} x) ... A(T x) A(x).
Mat2 orbit_product(const StepCocycle& a, const Iet& t, const Rational& x, std::int64_t n);

/// Lambda_1 .. Lambda_kmax in one refinement pass.
std::vector<double> lambda_profile(const StepCocycle& a, const Iet& t, std::int64_t kmax,
                                   std::size_t piece_cap = kDefaultPieceCap);

ExponentReport lambda_k(const StepCocycle& a, const Iet& t, std::int64_t k, std::size_t piece_cap = kDefaultPieceCap);

/// Exact exponent of a periodic system, integrated over `domain` (an invariant
/// set, default [0,1)) with the unnormalized Lebesgue measure.
ExponentReport le_periodic(const StepCocycle& a, const Iet& t, const std::optional<IntervalSet>& domain = std::nullopt,
                           std::size_t cap = kDefaultIterationCap);

/// Induced system on W; identity off W.
struct DerivedSystem {
  StepCocycle a_hat;
  Iet t_w;
  FirstReturn first_return;
};

/// Builds the derived cocycle and asserts its exponent equals the exponent of
/// A on the saturation of W.
DerivedSystem derived_cocycle(const StepCocycle& a, const Iet& t, const IntervalSet& w,
                              std::size_t cap = kDefaultIterationCap);

/// min over N in 1..N_max of Lambda_N.
ExponentReport le_inf_estimate(const StepCocycle& a, const Iet& t, std::int64_t n_max,
                               std::size_t piece_cap = kDefaultPieceCap);

/// [[lambda V(x), -1], [1, 0]].
StepCocycle schrodinger_cocycle(double lambda, const StepFunction<double>& v);

struct ProbeRow {
  Rational delta;
  double max_lambda;  ///< over T and every sampled S within delta
  std::size_t samples;
};

/// Samples S = P o T with P a random set of disjoint adjacent swaps of cells of
/// width at most delta; every sample is checked to lie within weak distance delta.
std::vector<ProbeRow> semicontinuity_probe(const StepCocycle& a, const Iet& t, std::int64_t k,
                                           const std::vector<Rational>& deltas, std::size_t samples,
                                           std::uint64_t seed);

}  // namespace cforge
