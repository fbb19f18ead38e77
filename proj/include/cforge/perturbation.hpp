#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cforge/cocycle.hpp"
#include "cforge/dynamics.hpp"
#include "cforge/hyperbolicity.hpp"
#include "cforge/measures.hpp"
#include "cforge/sl2.hpp"

namespace cforge {

/// Cyclic permutation within displacement 2 of sigma (0-based values).
std::vector<std::size_t> cyclify(const std::vector<std::size_t>& sigma);
std::size_t max_displacement(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y);

inline constexpr std::size_t kDefaultPieceBudget = 1 << 20;

/// One column J_1 -> ... -> J_N of a convolution tower.
struct TowerColumn {
  std::vector<std::size_t> word;  ///< cell index per level
  std::vector<Interval> levels;
  Mat2 product;  ///< A_{j_N} ... A_{j_1}
};

struct ConvolutionTower {
  Iet f;
  IntervalSet z;
  std::int64_t n = 1;
  std::vector<TowerColumn> columns;  ///< words in lexicographic order
};

/// Tower over the M equal cells of A (M = least common denominator of its breakpoints).
ConvolutionTower convolution_tower(const StepCocycle& a, std::int64_t n,
                                   std::size_t piece_budget = kDefaultPieceBudget);

/// Same construction on disjoint cells of one common length; F is the identity off the cells.
ConvolutionTower convolution_tower_on(const std::vector<CocyclePiece>& cells, std::int64_t n,
                                      std::size_t piece_budget = kDefaultPieceBudget);

/// Law of A_F^N under Lebesgue measure restricted to Z.
AtomicMeasureG tower_pushforward(const StepCocycle& a, const ConvolutionTower& ct);

/// Cycle product of a cyclic tower read from the left end of its base.
Mat2 tower_product(const StepCocycle& a, const Iet& t, const Tower& tw);

/// Cuts the base into n equal parts and stacks them into one tower of height n h.
Iet tower_split_stack(const Iet& t, const Tower& tw, std::int64_t n);

/// Joins two cyclic towers with equal base measure into one tower (tw1 first).
Iet tower_concatenate(const Iet& t, const Tower& tw1, const Tower& tw2);

struct LiouvilleHit {
  std::int64_t n;
  double value;  ///< log rho(R^n H^psi(n)) / psi(n)
};

/// log rho(R^n H^m), evaluated in the eigenbasis of H when H is hyperbolic.
double liouville_log_radius(const Mat2& r, const Mat2& h, std::int64_t n, std::int64_t m);

/// Smallest n <= n_max whose value is below epsilon. `best` receives the least
/// value seen. With `shortcut`, a non-hyperbolic H returns n = 1 at once.
std::optional<LiouvilleHit> liouville_search(const Mat2& r, const Mat2& h,
                                             const std::function<std::int64_t(std::int64_t)>& psi,
                                             double epsilon, std::int64_t n_max, bool shortcut = true,
                                             LiouvilleHit* best = nullptr);

/// R_theta A_{n-1} ... R_theta A_0.
Mat2 interleaved_product(const std::vector<Mat2>& word, double theta);

/// Smallest |theta| <= theta_budget found on a sign-symmetric grid (refined by
/// bisection) making the interleaved product elliptic.
std::optional<double> avila_theta_search(const std::vector<Mat2>& word, double theta_budget);

struct BridgeSchedule {
  std::int64_t ell;
  std::int64_t p;
  std::int64_t k;  ///< (ell + 2) p
  double trace;    ///< of (B2 B1) H^ell
  double angle_error;
};

BridgeSchedule hyperbolic_bridge_schedule(const Mat2& h, const Mat2& b1, const Mat2& b2, double delta, double c,
                                          std::int64_t ell_max = 256, double angle_tol = kPi / 180.0);

/// Words over letters {1, 2} of length <= n_max with fewer than p n letters 2
/// and ||A_i1 ... A_in|| <= lambda^n.
std::vector<std::vector<int>> frequency_word_scan(const Mat2& a1, const Mat2& a2, double p, double lambda,
                                                  std::int64_t n_max, std::uint64_t budget = 1ULL << 22);

struct TraceEntry {
  std::string step;
  std::vector<std::pair<std::string, std::string>> params;
};

struct SurgeryReport {
  Iet t_tilde;
  Rational weak_dist;
  double le_before = 0.0;
  double le_after = 0.0;
  /// le_after target: delta (discrete) or 4 delta (rich) plus slack.
  double bound = 0.0;
  double slack = 0.0;
  bool targets_met = false;
  std::vector<TraceEntry> trace_log;
};

struct DiscreteOptions {
  std::int64_t max_word_len = 8;
  std::int64_t n_max = 10000;
  std::uint64_t word_budget = kDefaultWordBudget;
};

SurgeryReport lower_exponent_discrete(const StepCocycle& a, const Iet& t, const Rational& epsilon, double delta,
                                      const DiscreteOptions& options = {});

struct RichOptions {
  std::int64_t evidence_n_max = 3;
  int v_grid = 16;
  int bins = 64;
  double angle_tol = kPi / 180.0;
  std::int64_t ell_max = 64;
  std::size_t piece_budget = kDefaultPieceBudget;
};

SurgeryReport lower_exponent_rich(const StepCocycle& a, const MatrixFamily& evidence, const Iet& t,
                                  const Rational& epsilon, double delta, const RichOptions& options = {});

}  // namespace cforge
