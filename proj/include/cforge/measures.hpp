#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cforge/cocycle.hpp"
#include "cforge/hyperbolicity.hpp"
#include "cforge/rational.hpp"
#include "cforge/sl2.hpp"

namespace cforge {

/// Atoms closer than this in max-entry distance are merged.
inline constexpr double kCoalesceTol = 1e-10;
inline constexpr std::size_t kDefaultAtomCap = 1000000;

struct Atom {
  Mat2 matrix;
  Rational weight;
};

/// Finite positive combination of Dirac masses on SL(2,R), coalesced and sorted
/// lexicographically by entries.
class AtomicMeasureG {
 public:
  AtomicMeasureG() = default;
  explicit AtomicMeasureG(std::vector<Atom> atoms);
  static AtomicMeasureG dirac(const Mat2& m, const Rational& weight = Rational(1));

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  const Rational& total_mass() const { return total_; }
  double sup_norm() const;
  AtomicMeasureG scaled(const Rational& factor) const;

 private:
  std::vector<Atom> atoms_;
  Rational total_{0};
};

/// Law of A under Lebesgue measure.
AtomicMeasureG pushforward(const StepCocycle& a);

/// Law of M_N ... M_1 for independent draws; N >= 2 needs a probability measure.
/// The result is rescaled to `target_mass` when given.
AtomicMeasureG convolve_power(const AtomicMeasureG& nu, std::int64_t n, std::size_t atom_cap = kDefaultAtomCap,
                              const std::optional<Rational>& target_mass = std::nullopt);

AtomicMeasureG inverse_measure(const AtomicMeasureG& nu);

struct DirectionHistogram {
  std::vector<double> mass;

  double bin_width() const { return kPi / static_cast<double>(mass.size()); }
  double bin_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * bin_width(); }
  double total() const;
};

/// Each atom puts its weight in the bin of act(atom, v); bins split [0, pi) evenly.
DirectionHistogram direction_pushforward(const AtomicMeasureG& nu, ProjDir v, int bins);

/// Parameter grid t_i = t_0 + i h with one matrix per point.
struct MatrixFamily {
  std::vector<Rational> grid;
  std::vector<Mat2> matrices;
  Rational step;

  /// t_i = i / points for i < points.
  static MatrixFamily sample(const std::function<Mat2(double)>& f, int points);
  /// Uniform probability on the sampled matrices.
  AtomicMeasureG empirical() const;
};

struct RichnessKappa {
  double kappa_fwd;
  double kappa_inv;
  std::vector<double> per_direction_fwd;
  std::vector<double> per_direction_inv;
};

/// Minimal binned density of nu^{*N} * v (and of its inverse) over the directions
/// v_j = pi (j + 1/3) / v_grid.
RichnessKappa richness_kappa(const MatrixFamily& family, std::int64_t n, int v_grid, int bins,
                             std::size_t atom_cap = kDefaultAtomCap);

struct CriterionReport {
  std::optional<Word> elliptic_word;
  bool nonconstant = false;
  bool trace_locally_constant = false;
  /// tr A(t_0) A(t) varies with t.
  bool doubled_trace_nonconstant = false;
  double max_difference_quotient = 0.0;
};

CriterionReport richness_criterion(const MatrixFamily& family, std::int64_t max_len = 2, double threshold = 1e-8);

/// Optimal transport cost with ground cost ||A - B|| between measures of equal mass.
double measure_distance(const AtomicMeasureG& nu1, const AtomicMeasureG& nu2);

}  // namespace cforge
