#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cforge/errors.hpp"
#include "cforge/perturbation.hpp"

namespace cforge {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num(std::int64_t x) { return std::to_string(x); }
std::string num(std::size_t x) { return std::to_string(x); }

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

bool close_matrices(const Mat2& x, const Mat2& y, double rel) {
  return x.distance(y) <= rel * std::max({1.0, x.norm(), y.norm()});
}

// Cells [j/M, (j+1)/M) of a cyclic rank-M interval permutation.
struct CellLayout {
  std::size_t m = 0;
  Rational width;
  RankedPermutation perm;
  std::vector<std::size_t> orbit;  ///< T-order starting at cell 0
  std::vector<char> good;          ///< A constant on the cell
  std::vector<Mat2> value;         ///< A at the left end of the cell

  IntervalSet cell(std::size_t j) const {
    const Rational lo = width * Rational(static_cast<long>(j));
    return IntervalSet({{lo, lo + width}});
  }
};

CellLayout make_layout(const StepCocycle& a, const Iet& t) {
  CellLayout l;
  l.m = minimal_rank(t);
  l.perm = as_interval_permutation(t, l.m);
  if (!l.perm.is_cyclic) fail(ErrorKind::PreconditionViolation, "T is not a cyclic interval permutation");
  l.width = Rational(1) / Rational(static_cast<long>(l.m));
  const StepCocycle merged = a.merged();
  for (std::size_t j = 0, k = 0; k < l.m; ++k, j = l.perm.sigma[j]) l.orbit.push_back(j);
  for (std::size_t j = 0; j < l.m; ++j) {
    const Rational lo = l.width * Rational(static_cast<long>(j));
    l.good.push_back(merged.pieces()[merged.piece_index(lo)].hi >= lo + l.width);
    l.value.push_back(a(lo));
  }
  return l;
}

Iet cycles_to_iet(std::size_t m, const std::vector<std::vector<std::size_t>>& cycles) {
  std::vector<std::size_t> sigma(m);
  for (std::size_t j = 0; j < m; ++j) sigma[j] = j;
  for (const auto& c : cycles)
    for (std::size_t i = 0; i < c.size(); ++i) sigma[c[i]] = c[(i + 1) % c.size()];
  return iet_from_permutation(m, sigma).map;
}

SurgeryReport finish_report(SurgeryReport r, const StepCocycle& a, const Iet& t, const Iet& t_tilde,
                            const Rational& epsilon) {
  r.t_tilde = t_tilde;
  r.weak_dist = weak_distance(t_tilde, t);
  r.le_after = le_periodic(a, t_tilde).value;
  r.targets_met = r.weak_dist < epsilon && r.le_after < r.bound;
  r.trace_log.push_back({"verify",
                         {{"weak_dist", format_rational(r.weak_dist)},
                          {"le_after", num(r.le_after)},
                          {"bound", num(r.bound)},
                          {"targets_met", r.targets_met ? "true" : "false"}}});
  return r;
}

}  // namespace

SurgeryReport lower_exponent_discrete(const StepCocycle& a, const Iet& t, const Rational& epsilon, double delta,
                                      const DiscreteOptions& options) {
  if (epsilon <= 0 || !(delta > 0.0)) fail(ErrorKind::DomainError, "epsilon and delta must be positive");
  const CellLayout lay = make_layout(a, t);
  if (Rational(static_cast<long>(lay.m)) * epsilon < 4)
    fail(ErrorKind::PreconditionViolation, "rank M must be at least 4/epsilon");
  SurgeryReport rep;
  rep.le_before = le_inf_estimate(a, t, static_cast<std::int64_t>(lay.m)).value;

  std::vector<Atom> good_atoms;
  for (std::size_t j = 0; j < lay.m; ++j)
    if (lay.good[j]) good_atoms.push_back({lay.value[j], lay.width});
  if (good_atoms.empty()) fail(ErrorKind::PreconditionViolation, "no cell carries a constant matrix");
  const AtomicMeasureG sigma_measure(std::move(good_atoms));
  std::vector<Mat2> sigma;
  for (const auto& at : sigma_measure.atoms()) sigma.push_back(at.matrix);
  std::vector<std::size_t> letter(lay.m, sigma.size());
  for (std::size_t j = 0; j < lay.m; ++j) {
    if (!lay.good[j]) continue;
    for (std::size_t s = 0; s < sigma.size(); ++s)
      if (lay.value[j].distance(sigma[s]) <= kCoalesceTol) letter[j] = s;
  }
  std::size_t bad = 0;
  for (char g : lay.good) bad += g ? 0 : 1;
  rep.trace_log.push_back({"partition", {{"M", num(lay.m)}, {"sigma_size", num(sigma.size())}, {"bad_cells", num(bad)}}});

  const auto word = elliptic_in_semigroup(sigma, options.max_word_len, options.word_budget);
  if (!word)
    fail(ErrorKind::NoEllipticWord, "no elliptic word of length <= " + std::to_string(options.max_word_len));
  rep.trace_log.push_back(
      {"elliptic_word", {{"word", join(*word)}, {"trace", num(word_product(sigma, *word).trace())}}});

  // Small tower: a run of the orbit spelling the word, else the first matching cells.
  std::vector<std::size_t> small;
  const std::size_t len = word->size();
  for (std::size_t s = 0; s < lay.m && small.empty() && len <= lay.m; ++s) {
    std::vector<std::size_t> run;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t j = lay.orbit[(s + i) % lay.m];
      if (!lay.good[j] || letter[j] != (*word)[i]) break;
      run.push_back(j);
    }
    if (run.size() == len) small = run;
  }
  std::vector<char> used(lay.m, 0);
  if (small.empty()) {
    for (std::size_t i = 0; i < len; ++i) {
      auto it = std::find_if(lay.orbit.begin(), lay.orbit.end(),
                             [&](std::size_t j) { return !used[j] && lay.good[j] && letter[j] == (*word)[i]; });
      if (it == lay.orbit.end()) fail(ErrorKind::PreconditionViolation, "too few cells to realize the elliptic word");
      used[*it] = 1;
      small.push_back(*it);
    }
  }
  for (auto j : small) used[j] = 1;
  std::vector<std::size_t> big, frozen;
  for (auto j : lay.orbit) {
    if (used[j]) continue;
    if (lay.good[j]) big.push_back(j);
    else frozen.push_back(j);
  }
  auto counts = [&](const std::vector<std::size_t>& cells) {
    std::vector<long> c(sigma.size(), 0);
    for (auto j : cells) ++c[letter[j]];
    return c;
  };
  auto collinear = [&](const std::vector<long>& x, const std::vector<long>& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t k = i + 1; k < x.size(); ++k)
        if (x[i] * y[k] != x[k] * y[i]) return false;
    return true;
  };
  std::size_t removed = 0;
  while (sigma.size() >= 2 && big.size() > 1 && collinear(counts(small), counts(big))) {
    frozen.push_back(big.back());
    big.pop_back();
    ++removed;
  }
  if (big.empty()) fail(ErrorKind::PreconditionViolation, "no cells left for the big tower");
  rep.trace_log.push_back({"towers",
                           {{"small_cells", join(small)},
                            {"big_height", num(big.size())},
                            {"frozen", num(frozen.size())},
                            {"removed_levels", num(removed)}}});

  std::vector<std::vector<std::size_t>> cycles{small, big};
  for (auto j : frozen) cycles.push_back({j});
  const Iet t1 = cycles_to_iet(lay.m, cycles);
  const Tower small_tw = tower_from_base(t1, lay.cell(small.front()));
  const Tower big_tw = tower_from_base(t1, lay.cell(big.front()));
  const Mat2 r = tower_product(a, t1, small_tw);
  const Mat2 h = tower_product(a, t1, big_tw);
  check(close_matrices(r, word_product(sigma, *word), 1e-9), "small tower product differs from the elliptic word");

  const double eps_l = static_cast<double>(lay.m) * delta;
  LiouvilleHit best{0, 0.0};
  const auto hit = liouville_search(r, h, [](std::int64_t n) { return n; }, eps_l, options.n_max, false, &best);
  if (!hit)
    fail(ErrorKind::LiouvilleNotFound, "best value " + num(best.value) + " at n = " + num(best.n) +
                                           " above " + num(eps_l));
  const std::int64_t n = hit->n;
  rep.trace_log.push_back({"liouville",
                           {{"n", num(n)}, {"value", num(hit->value)}, {"epsilon_L", num(eps_l)},
                            {"trace_R", num(r.trace())}, {"trace_H", num(h.trace())}}});

  const Iet t2 = tower_split_stack(t1, small_tw, n);
  const Iet t3 = tower_split_stack(t2, tower_from_base(t2, big_tw.base), n);
  const Rational part = lay.width / Rational(n);
  const IntervalSet small_base = small_tw.base.slice_by_measure(0, part);
  const IntervalSet big_base = big_tw.base.slice_by_measure(0, part);
  const Tower small_n = tower_from_base(t3, small_base);
  const Tower big_n = tower_from_base(t3, big_base);
  check(close_matrices(tower_product(a, t3, small_n), power(r, n), 1e-9), "split tower product differs from R^n");
  check(close_matrices(tower_product(a, t3, big_n), power(h, n), 1e-9), "split tower product differs from H^n");
  const Iet t_tilde = tower_concatenate(t3, small_n, big_n);
  const Tower joined = tower_from_base(t_tilde, small_base);
  check(close_matrices(tower_product(a, t_tilde, joined), power(h, n) * power(r, n), 1e-9),
        "concatenated tower product differs from H^n R^n");
  rep.trace_log.push_back({"surgery", {{"split", num(n)}, {"height", num(joined.height)}}});

  rep.bound = delta;
  rep.slack = static_cast<double>(frozen.size()) * to_double(lay.width) * std::log(a.sup_norm());
  rep.bound += rep.slack;
  return finish_report(std::move(rep), a, t, t_tilde, epsilon);
}

SurgeryReport lower_exponent_rich(const StepCocycle& a, const MatrixFamily& evidence, const Iet& t,
                                  const Rational& epsilon, double delta, const RichOptions& options) {
  if (epsilon <= 0 || !(delta > 0.0)) fail(ErrorKind::DomainError, "epsilon and delta must be positive");
  SurgeryReport rep;
  std::int64_t n_ev = 0;
  RichnessKappa kappa{};
  for (std::int64_t n = 1; n <= options.evidence_n_max && n_ev == 0; ++n) {
    kappa = richness_kappa(evidence, n, options.v_grid, options.bins);
    if (kappa.kappa_fwd > 0.0 && kappa.kappa_inv > 0.0) n_ev = n;
  }
  if (n_ev == 0)
    fail(ErrorKind::RichnessEvidenceMissing,
         "kappa = 0 for every N <= " + std::to_string(options.evidence_n_max));
  rep.trace_log.push_back(
      {"evidence", {{"N", num(n_ev)}, {"kappa_fwd", num(kappa.kappa_fwd)}, {"kappa_inv", num(kappa.kappa_inv)}}});

  const CellLayout lay = make_layout(a, t);
  rep.le_before = le_periodic(a, t).value;
  const double c = a.sup_norm();
  rep.bound = 4.0 * delta;
  if (rep.le_before <= 1e-12) {
    rep.trace_log.push_back({"trivial", {{"le_before", num(rep.le_before)}}});
    return finish_report(std::move(rep), a, t, t, epsilon);
  }

  std::vector<std::size_t> good, rich;
  for (auto j : lay.orbit) (lay.good[j] ? good : rich).push_back(j);
  if (good.empty() || rich.empty())
    fail(ErrorKind::PreconditionViolation, "need both constant cells and a non-constant rich region");
  std::sort(rich.begin(), rich.end());
  mpz_class den = lay.width.get_den();
  for (const auto& p : a.pieces()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), p.lo.get_den().get_mpz_t());
  const Rational u = Rational(1) / Rational(den);
  std::vector<CocyclePiece> sub;
  for (auto j : rich) {
    const Rational lo = lay.width * Rational(static_cast<long>(j));
    for (Rational x = lo; x < lo + lay.width; x += u) sub.push_back({x, x + u, a(x)});
    if (sub.size() > options.piece_budget) fail(ErrorKind::SizeOverflow, "rich region too finely divided");
  }
  const ConvolutionTower ct = convolution_tower_on(sub, n_ev, options.piece_budget);
  rep.trace_log.push_back({"convolution_tower",
                           {{"N", num(n_ev)}, {"cells", num(sub.size())}, {"columns", num(ct.columns.size())},
                            {"Z", format_rational(ct.z.measure())}}});

  const Iet t1 = compose(ct.f, cycles_to_iet(lay.m, {good}));
  const IntervalSet base = lay.cell(good.front());
  const IntervalSet w = base.unite(ct.z);
  const DerivedSystem ds = derived_cocycle(a, t1, w);
  check(ds.t_w == Iet::identity(), "return map to W is not the identity");
  const Mat2 h = ds.a_hat(base.parts().front().lo);
  check(close_matrices(h, tower_product(a, t1, tower_from_base(t1, base)), 1e-9), "derived cocycle on the base");
  const Rational beta = base.measure();
  rep.trace_log.push_back({"derived", {{"trace_H", num(h.trace())}, {"log_rho_H", num(log_spectral_radius(h))}}});

  std::vector<Piece> s_pieces;
  Rational z_used(0);
  if (classify(h) == MatClass::Hyperbolic && log_spectral_radius(h) >= 0.25 * delta) {
    const Eigendirections e = eigendirections(h);
    std::vector<Mat2> col;
    for (const auto& cl : ct.columns) col.push_back(ds.a_hat(cl.levels[0].lo));
    const Rational cw = ct.columns.front().levels[0].length();
    auto bridges = [&](std::size_t i, std::size_t j) {
      return angle_distance(act(col[j] * col[i], e.unstable), e.stable) <= options.angle_tol;
    };
    std::optional<BridgeSchedule> sched;
    for (std::size_t i = 0; i < col.size() && !sched; ++i) {
      for (std::size_t j = 0; j < col.size() && !sched; ++j) {
        if (i == j || !bridges(i, j)) continue;
        const double cs = std::max({c, h.norm(), std::sqrt((col[j] * col[i]).norm())});
        try {
          sched = hyperbolic_bridge_schedule(h, col[i], col[j], delta, cs, options.ell_max, options.angle_tol);
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::NoEllipticEll) throw;
        }
      }
    }
    if (!sched) fail(ErrorKind::BridgeNotFound, "no atom pair sends e^u(H) to e^s(H) with an elliptic run");
    rep.trace_log.push_back({"bridge_schedule",
                             {{"ell", num(sched->ell)}, {"p", num(sched->p)}, {"k", num(sched->k)},
                              {"angle_error", num(sched->angle_error)}}});

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::int64_t ell = 0;
    Rational piece;
    Mat2 hl = power(h, sched->ell - 1);
    for (std::int64_t l = sched->ell; l <= options.ell_max && ell == 0; ++l) {
      hl = h * hl;
      const Rational need_r = beta / (Rational(l) * cw);
      mpz_class need_z;
      mpz_cdiv_q(need_z.get_mpz_t(), need_r.get_num().get_mpz_t(), need_r.get_den().get_mpz_t());
      const std::size_t need = need_z.get_ui();
      std::vector<char> taken(col.size(), 0);
      pairs.clear();
      for (std::size_t i = 0; i < col.size() && pairs.size() < need; ++i) {
        if (taken[i]) continue;
        for (std::size_t j = 0; j < col.size(); ++j) {
          if (j == i || taken[j] || !bridges(i, j)) continue;
          if (classify(col[j] * col[i] * hl) != MatClass::Elliptic) continue;
          taken[i] = taken[j] = 1;
          pairs.push_back({i, j});
          break;
        }
      }
      if (pairs.size() >= need && need > 0) {
        ell = l;
        piece = beta / (Rational(l) * Rational(static_cast<long>(pairs.size())));
      }
    }
    if (ell == 0) fail(ErrorKind::BridgeNotFound, "bridge pairs cannot absorb the base mass");

    const auto l = static_cast<std::size_t>(ell);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      std::vector<IntervalSet> cyc;
      for (std::size_t q = 0; q < l; ++q) {
        const Rational from = piece * Rational(static_cast<long>(k * l + q));
        cyc.push_back(base.slice_by_measure(from, from + piece));
      }
      for (auto idx : {pairs[k].first, pairs[k].second}) {
        const Rational lo = ct.columns[idx].levels[0].lo;
        cyc.push_back(IntervalSet({{lo, lo + piece}}));
        z_used += piece;
      }
      for (std::size_t q = 0; q < cyc.size(); ++q) {
        const auto moved = transport(cyc[q], cyc[(q + 1) % cyc.size()]);
        s_pieces.insert(s_pieces.end(), moved.begin(), moved.end());
      }
    }
    rep.trace_log.push_back({"allocation",
                             {{"ell", num(ell)}, {"pairs", num(pairs.size())}, {"piece", format_rational(piece)}}});
  } else {
    rep.trace_log.push_back({"no_bridge", {{"reason", "rho(H) < exp(delta/4)"}}});
  }

  const Rational unused = ct.z.measure() - z_used;
  rep.slack = to_double(unused) * static_cast<double>(n_ev) * std::log(c);
  rep.bound += rep.slack;
  rep.trace_log.push_back({"slack", {{"unused_Z", format_rational(unused)}, {"slack", num(rep.slack)}}});
  const Iet t_tilde = compose(from_partial(s_pieces), t1);
  return finish_report(std::move(rep), a, t, t_tilde, epsilon);
}

}  // namespace cforge
