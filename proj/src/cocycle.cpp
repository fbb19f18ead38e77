#include "cforge/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cforge/errors.hpp"

namespace cforge {

namespace {

struct Walker {
  Rational lo, hi, s;
  Mat2 p;
};

// Cuts the position [plo, phi) along the breakpoints of both T and A, calling
// f(lo, hi, t_piece, a_piece) for every cell of the common refinement.
template <class F>
void split_position(const Iet& t, const StepCocycle& a, const Rational& plo, const Rational& phi, F&& f) {
  Rational x = plo;
  std::size_t i = t.piece_index(x), j = a.piece_index(x);
  while (x < phi) {
    const Piece& tp = t.pieces()[i];
    const CocyclePiece& ap = a.pieces()[j];
    Rational end = std::min(tp.hi, ap.hi);
    if (phi < end) end = phi;
    f(x, end, tp, ap);
    x = end;
    if (x >= tp.hi) ++i;
    if (x >= ap.hi) ++j;
  }
}

}  // namespace

StepCocycle::StepCocycle() { pieces_.push_back({Rational(0), Rational(1), Mat2()}); }

StepCocycle::StepCocycle(std::vector<CocyclePiece> pieces) : pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(), [](const CocyclePiece& x, const CocyclePiece& y) { return x.lo < y.lo; });
  Rational cur(0);
  for (const auto& p : pieces_) {
    if (p.lo != cur || !(p.lo < p.hi)) fail(ErrorKind::DomainError, "cocycle pieces do not partition [0,1)");
    cur = p.hi;
    sup_norm_ = std::max(sup_norm_, p.matrix.norm());
  }
  if (cur != 1) fail(ErrorKind::DomainError, "cocycle pieces do not partition [0,1)");
}

StepCocycle StepCocycle::constant(const Mat2& m) { return StepCocycle({{Rational(0), Rational(1), m}}); }

StepCocycle StepCocycle::uniform(const std::vector<Mat2>& cells) {
  if (cells.empty()) fail(ErrorKind::DomainError, "uniform cocycle needs at least one cell");
  std::vector<CocyclePiece> pieces;
  const Rational m(static_cast<long>(cells.size()));
  for (std::size_t j = 0; j < cells.size(); ++j)
    pieces.push_back({Rational(static_cast<long>(j)) / m, Rational(static_cast<long>(j + 1)) / m, cells[j]});
  return StepCocycle(std::move(pieces));
}

std::vector<Rational> StepCocycle::breakpoints() const {
  std::vector<Rational> out;
  for (const auto& p : pieces_) out.push_back(p.lo);
  return out;
}

std::size_t StepCocycle::piece_index(const Rational& x) const {
  if (x < 0 || x >= 1) fail(ErrorKind::DomainError, "point outside [0,1)");
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](const Rational& v, const CocyclePiece& p) { return v < p.lo; });
  return static_cast<std::size_t>(std::distance(pieces_.begin(), it)) - 1;
}

StepCocycle StepCocycle::merged() const {
  std::vector<CocyclePiece> out;
  for (const auto& p : pieces_) {
    if (!out.empty() && out.back().matrix == p.matrix) out.back().hi = p.hi;
    else out.push_back(p);
  }
  return StepCocycle(std::move(out));
}

StepCocycle precompose(const StepCocycle& a, const Iet& s) {
  std::vector<CocyclePiece> out;
  for (const auto& p : s.pieces()) {
    Rational x = p.lo + p.shift;
    const Rational end = p.hi + p.shift;
    std::size_t j = a.piece_index(x);
    while (x < end) {
      const CocyclePiece& q = a.pieces()[j];
      Rational hi = std::min<Rational>(q.hi, end);
      out.push_back({x - p.shift, hi - p.shift, q.matrix});
      x = hi;
      ++j;
    }
  }
  return StepCocycle(std::move(out));
}

const char* exponent_kind_name(ExponentKind kind) {
  switch (kind) {
    case ExponentKind::ExactPeriodic: return "exact-periodic";
    case ExponentKind::LambdaK: return "lambda_k";
    case ExponentKind::InfEstimate: return "inf-estimate";
  }
  return "?";
}

Mat2 orbit_product(const StepCocycle& a, const Iet& t, const Rational& x, std::int64_t n) {
  if (n < 0) fail(ErrorKind::DomainError, "orbit_product needs n >= 0");
  Mat2 p;
  Rational y = x;
  for (std::int64_t i = 0; i < n; ++i) {
    p = a(y) * p;
    y = t(y);
  }
  return p;
}

std::vector<double> lambda_profile(const StepCocycle& a, const Iet& t, std::int64_t kmax, std::size_t piece_cap) {
  if (kmax < 1) fail(ErrorKind::DomainError, "k must be positive");
  std::vector<Walker> items{{Rational(0), Rational(1), Rational(0), Mat2()}};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(kmax));
  for (std::int64_t k = 1; k <= kmax; ++k) {
    std::vector<Walker> next;
    next.reserve(items.size());
    for (const auto& it : items) {
      split_position(t, a, it.lo + it.s, it.hi + it.s,
                     [&](const Rational& x, const Rational& end, const Piece& tp, const CocyclePiece& ap) {
                       Walker w{x - it.s, end - it.s, it.s + tp.shift, ap.matrix * it.p};
                       if (!next.empty() && next.back().hi == w.lo && next.back().s == w.s && next.back().p == w.p) {
                         next.back().hi = w.hi;
                       } else {
                         next.push_back(std::move(w));
                       }
                     });
      if (next.size() > piece_cap)
        fail(ErrorKind::RefinementOverflow, "refinement exceeds " + std::to_string(piece_cap) + " pieces");
    }
    items = std::move(next);
    double sum = 0.0;
    for (const auto& it : items) sum += to_double(it.hi - it.lo) * std::log(it.p.norm());
    out.push_back(sum / static_cast<double>(k));
  }
  return out;
}

ExponentReport lambda_k(const StepCocycle& a, const Iet& t, std::int64_t k, std::size_t piece_cap) {
  ExponentReport r;
  r.kind = ExponentKind::LambdaK;
  r.order = k;
  r.value = lambda_profile(a, t, k, piece_cap).back();
  return r;
}

ExponentReport le_periodic(const StepCocycle& a, const Iet& t, const std::optional<IntervalSet>& domain,
                           std::size_t cap) {
  struct Item {
    Rational lo, hi, s;
    Mat2 p;
    std::int64_t n, r;
  };
  const IntervalSet dom = domain ? *domain : IntervalSet::unit();
  ExponentReport report;
  report.kind = ExponentKind::ExactPeriodic;
  IntervalSet covered;
  std::size_t steps = 0;
  while (true) {
    const IntervalSet rest = dom.subtract(covered);
    if (rest.empty()) break;
    const IntervalSet j0({rest.parts().front()});
    std::vector<Item> stack{{j0.parts()[0].lo, j0.parts()[0].hi, Rational(0), Mat2(), 0, 0}};
    std::vector<Interval> visited;
    while (!stack.empty()) {
      Item it = std::move(stack.back());
      stack.pop_back();
      if (++steps > cap) fail(ErrorKind::NonPeriodic, "no period found within the iteration cap");
      visited.push_back({it.lo + it.s, it.hi + it.s});
      split_position(t, a, it.lo + it.s, it.hi + it.s,
                     [&](const Rational& x, const Rational& end, const Piece& tp, const CocyclePiece& ap) {
                       const Rational ns = it.s + tp.shift;
                       const Mat2 np = ap.matrix * it.p;
                       std::vector<Item> parts;
                       const Rational plo = x + tp.shift, phi = end + tp.shift;
                       Rational cur = plo;
                       for (const auto& part : j0.parts()) {
                         const Rational lo = std::max<Rational>(part.lo, plo), hi = std::min<Rational>(part.hi, phi);
                         if (lo >= hi) continue;
                         if (lo > cur) parts.push_back({cur - ns, lo - ns, ns, np, it.n + 1, it.r});
                         parts.push_back({lo - ns, hi - ns, ns, np, it.n + 1, it.r + 1});
                         cur = hi;
                       }
                       if (cur < phi) parts.push_back({cur - ns, phi - ns, ns, np, it.n + 1, it.r});
                       for (auto& q : parts) {
                         if (q.s == 0) {
                           check(q.r > 0, "periodic piece closed outside its base");
                           const double contribution = to_double(q.hi - q.lo) * log_spectral_radius(q.p) /
                                                       static_cast<double>(q.r);
                           report.towers.push_back(
                               {Rational(q.hi - q.lo) / Rational(static_cast<long>(q.r)), q.n, q.p.trace(), contribution});
                         } else {
                           stack.push_back(std::move(q));
                         }
                       }
                     });
    }
    covered = covered.unite(IntervalSet(std::move(visited)));
  }
  for (const auto& tw : report.towers) report.value += tw.contribution;
  return report;
}

DerivedSystem derived_cocycle(const StepCocycle& a, const Iet& t, const IntervalSet& w, std::size_t cap) {
  const std::vector<Rational> refine = a.breakpoints();
  FirstReturn fr = first_return(t, w, cap, &refine);
  std::vector<CocyclePiece> pieces;
  for (const auto& p : fr.pieces) pieces.push_back({p.lo, p.hi, orbit_product(a, t, p.lo, p.time)});
  const IntervalSet off = w.complement();
  for (const auto& r : off.parts()) pieces.push_back({r.lo, r.hi, Mat2()});
  DerivedSystem out{StepCocycle(std::move(pieces)), fr.map, std::move(fr)};
  const double lhs = le_periodic(out.a_hat, out.t_w, std::nullopt, cap).value;
  const double rhs = le_periodic(a, t, out.first_return.saturation, cap).value;
  check(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)), "derived cocycle exponent mismatch");
  return out;
}

ExponentReport le_inf_estimate(const StepCocycle& a, const Iet& t, std::int64_t n_max, std::size_t piece_cap) {
  const std::vector<double> prof = lambda_profile(a, t, n_max, piece_cap);
  const auto best = std::min_element(prof.begin(), prof.end());
  ExponentReport r;
  r.kind = ExponentKind::InfEstimate;
  r.value = *best;
  r.order = std::distance(prof.begin(), best) + 1;
  return r;
}

StepCocycle schrodinger_cocycle(double lambda, const StepFunction<double>& v) {
  std::vector<CocyclePiece> pieces;
  for (const auto& p : v.parts) pieces.push_back({p.lo, p.hi, Mat2(lambda * p.value, -1.0, 1.0, 0.0)});
  return StepCocycle(std::move(pieces));
}

std::vector<ProbeRow> semicontinuity_probe(const StepCocycle& a, const Iet& t, std::int64_t k,
                                           const std::vector<Rational>& deltas, std::size_t samples,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double base = lambda_k(a, t, k).value;
  std::vector<ProbeRow> rows;
  for (const auto& delta : deltas) {
    if (delta < 0) fail(ErrorKind::DomainError, "delta must be nonnegative");
    ProbeRow row{delta, base, 0};
    if (delta > 0) {
      mpz_class cells_z;
      mpz_cdiv_q(cells_z.get_mpz_t(), delta.get_den().get_mpz_t(), delta.get_num().get_mpz_t());
      const long cells = cells_z.get_si();
      if (cells < 2 || cells > 4096) fail(ErrorKind::DomainError, "delta outside the probe range");
      const Rational width = Rational(1) / Rational(cells);
      for (std::size_t sample = 0; sample < samples; ++sample) {
        const long offset = static_cast<long>(rng() & 1U);
        std::vector<Piece> swaps;
        for (long j = offset; j + 1 < cells; j += 2) {
          if (rng() & 1U) {
            swaps.push_back({width * j, width * (j + 1), width});
            swaps.push_back({width * (j + 1), width * (j + 2), -width});
          }
        }
        const Iet s = compose(from_partial(swaps), t);
        check(weak_distance(s, t) <= delta, "probe sample outside the requested weak ball");
        row.max_lambda = std::max(row.max_lambda, lambda_k(a, s, k).value);
        ++row.samples;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cforge
