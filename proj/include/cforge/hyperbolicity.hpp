#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cforge/cocycle.hpp"
#include "cforge/sl2.hpp"

namespace cforge {

/// Atom indices [i1, ..., in]; the product is A_in ... A_i1.
using Word = std::vector<std::size_t>;

inline constexpr std::uint64_t kDefaultWordBudget = 1ULL << 24;

Mat2 word_product(const std::vector<Mat2>& sigma, const Word& word);

enum class UhStatus { CertifiedUH, CounterexampleWord, Undecided };
const char* uh_status_name(UhStatus s);

struct UhVerdict {
  UhStatus status = UhStatus::Undecided;
  double lambda = 0.0;
  Word witness;
  double witness_norm = 0.0;
  std::int64_t depth_reached = 0;
  std::vector<ProjInterval> family;
};

/// Checks ||A_in ... A_i1|| > lambda^n over all words up to `depth`; reports the
/// shortest, then lexicographically least, violation.
UhVerdict word_scan(const std::vector<Mat2>& sigma, std::int64_t depth, double lambda,
                    std::uint64_t budget = kDefaultWordBudget, unsigned threads = 1);

struct IntervalCertificate {
  std::vector<ProjInterval> family;
  double lambda;
};

/// Every atom maps every component of the family strictly inside some component.
bool verify_certificate(const std::vector<Mat2>& sigma, const std::vector<ProjInterval>& family);

/// Strictly invariant family of at most 4 closed arcs with endpoints on a grid of
/// pi/resolution, or nothing.
std::optional<IntervalCertificate> interval_certificate(const std::vector<Mat2>& sigma, int resolution);

/// Directions fixed by the projective action of m; every direction for +-identity
/// is reported as an empty list with `all` set.
struct FixedDirections {
  std::vector<double> angles;
  bool all = false;
};
FixedDirections fixed_directions(const Mat2& m);

enum class AddendumTag { i1, i21, i22, i23, none };
const char* addendum_tag_name(AddendumTag t);

struct AddendumCase {
  AddendumTag tag = AddendumTag::none;
  std::optional<ProjDir> direction;
  std::optional<ProjInterval> interval;
  double lambda0 = 0.0;
  /// Atoms (by piece value) mapping the interval into its interior.
  std::size_t strict_atoms = 0;
  std::size_t atoms = 0;
};

AddendumCase addendum_classify(const StepCocycle& a, int resolution);

/// Shortest, then lexicographically least, elliptic word of length at most
/// max_len within the word budget; then schedules A^n B over a pool of short words.
std::optional<Word> elliptic_in_semigroup(const std::vector<Mat2>& sigma, std::int64_t max_len,
                                          std::uint64_t budget = kDefaultWordBudget);

}  // namespace cforge
