#include "cforge/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cforge/errors.hpp"

namespace cforge {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t x, std::size_t y) { parent[find(x)] = find(y); }
};

void require_bijection(const std::vector<std::size_t>& sigma) {
  std::vector<char> seen(sigma.size(), 0);
  for (auto v : sigma) {
    if (v >= sigma.size() || seen[v]) fail(ErrorKind::InvalidPermutation, "not a bijection of {0..N-1}");
    seen[v] = 1;
  }
}

// Power of an elliptic matrix through its normal form, free of drift.
Mat2 elliptic_power(const ConjugacyForm& f, std::int64_t n) {
  const double angle = std::fmod(f.sign * f.theta * static_cast<double>(n), 2.0 * kPi);
  return f.L * Mat2::rotation(angle) * f.L.inverse();
}

// log of acosh(exp(log_tr) / 2), accurate for huge traces.
double log_radius_from_log_trace(double log_tr) {
  if (log_tr < std::log(2.0)) return 0.0;
  if (log_tr < 30.0) return std::acosh(0.5 * std::exp(log_tr));
  return log_tr + std::log(0.5 + std::sqrt(0.25 - std::exp(-2.0 * log_tr)));
}

bool is_elliptic_at(const std::vector<Mat2>& word, double theta) {
  return classify(interleaved_product(word, theta)) == MatClass::Elliptic;
}

}  // namespace

std::size_t max_displacement(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
  if (x.size() != y.size()) fail(ErrorKind::DomainError, "permutations of different sizes");
  std::size_t d = 0;
  for (std::size_t j = 0; j < x.size(); ++j) d = std::max(d, x[j] > y[j] ? x[j] - y[j] : y[j] - x[j]);
  return d;
}

std::vector<std::size_t> cyclify(const std::vector<std::size_t>& sigma) {
  require_bijection(sigma);
  const std::size_t n = sigma.size();
  std::vector<std::size_t> out = sigma, pos(n);
  for (std::size_t j = 0; j < n; ++j) pos[sigma[j]] = j;
  UnionFind cycles(n);
  for (std::size_t j = 0; j < n; ++j) cycles.unite(j, sigma[j]);
  // Phase k swaps the preimages of v and v+1, v = k mod 2, when their cycles differ.
  for (std::size_t phase = 0; phase < 2; ++phase) {
    for (std::size_t v = phase; v + 1 < n; v += 2) {
      if (cycles.find(v) == cycles.find(v + 1)) continue;
      std::swap(out[pos[v]], out[pos[v + 1]]);
      std::swap(pos[v], pos[v + 1]);
      cycles.unite(v, v + 1);
    }
  }
  check(n == 0 || is_cyclic_permutation(out), "cyclify produced a non-cyclic permutation");
  check(max_displacement(out, sigma) <= 2, "cyclify exceeded displacement 2");
  return out;
}

ConvolutionTower convolution_tower_on(const std::vector<CocyclePiece>& cells, std::int64_t n,
                                      std::size_t piece_budget) {
  if (cells.empty() || n < 1) fail(ErrorKind::DomainError, "convolution tower needs cells and N >= 1");
  const std::size_t m = cells.size();
  const Rational len = cells[0].hi - cells[0].lo;
  for (const auto& c : cells)
    if (c.hi - c.lo != len) fail(ErrorKind::DomainError, "convolution tower cells must share one length");
  const double size = static_cast<double>(n) * std::pow(static_cast<double>(m), static_cast<double>(n));
  if (size > static_cast<double>(piece_budget))
    fail(ErrorKind::SizeOverflow, "N M^N exceeds the piece budget " + std::to_string(piece_budget));
  const auto un = static_cast<std::size_t>(n);
  std::size_t words = 1;
  for (std::size_t i = 0; i < un; ++i) words *= m;
  const Rational width = len / Rational(static_cast<long>(n * static_cast<std::int64_t>(words / m)));

  ConvolutionTower ct;
  ct.n = n;
  std::vector<std::size_t> used(m, 0);
  std::vector<Piece> pieces;
  std::vector<Interval> base;
  for (std::size_t w = 0; w < words; ++w) {
    TowerColumn col;
    col.word.resize(un);
    for (std::size_t i = 0, rest = w; i < un; ++i, rest /= m) col.word[un - 1 - i] = rest % m;
    for (std::size_t i = 0; i < un; ++i) {
      const std::size_t j = col.word[i];
      const Rational lo = cells[j].lo + width * Rational(static_cast<long>(used[j]++));
      col.levels.push_back({lo, lo + width});
      col.product = cells[j].matrix * col.product;
    }
    for (std::size_t i = 0; i < un; ++i) {
      const Interval& from = col.levels[i];
      const Interval& to = col.levels[(i + 1) % un];
      pieces.push_back({from.lo, from.hi, to.lo - from.lo});
    }
    base.push_back(col.levels[0]);
    ct.columns.push_back(std::move(col));
  }
  ct.f = from_partial(pieces);
  ct.z = IntervalSet(std::move(base));
  check(iterate(ct.f, n) == Iet::identity(), "F^N is not the identity");
  return ct;
}

ConvolutionTower convolution_tower(const StepCocycle& a, std::int64_t n, std::size_t piece_budget) {
  mpz_class den = 1;
  for (const auto& p : a.pieces()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), p.lo.get_den().get_mpz_t());
  if (!den.fits_slong_p() || static_cast<double>(den.get_si()) > static_cast<double>(piece_budget))
    fail(ErrorKind::SizeOverflow, "cocycle partition too fine for a convolution tower");
  const long m = den.get_si();
  std::vector<CocyclePiece> cells;
  for (long j = 0; j < m; ++j) {
    const Rational lo = Rational(j) / Rational(m);
    cells.push_back({lo, Rational(j + 1) / Rational(m), a(lo)});
  }
  return convolution_tower_on(cells, n, piece_budget);
}

AtomicMeasureG tower_pushforward(const StepCocycle& a, const ConvolutionTower& ct) {
  std::vector<Atom> atoms;
  for (const auto& col : ct.columns)
    atoms.push_back({orbit_product(a, ct.f, col.levels[0].lo, ct.n), col.levels[0].length()});
  return AtomicMeasureG(std::move(atoms));
}

Mat2 tower_product(const StepCocycle& a, const Iet& t, const Tower& tw) {
  if (tw.base.empty()) fail(ErrorKind::DomainError, "tower has an empty base");
  return orbit_product(a, t, tw.base.parts().front().lo, static_cast<std::int64_t>(tw.height));
}

Iet tower_split_stack(const Iet& t, const Tower& tw, std::int64_t n) {
  if (n < 1) fail(ErrorKind::DomainError, "split count must be positive");
  if (n == 1) return t;
  const Rational mass = tw.base.measure();
  std::vector<IntervalSet> parts;
  for (std::int64_t k = 0; k < n; ++k)
    parts.push_back(tw.base.slice_by_measure(mass * Rational(k) / Rational(n), mass * Rational(k + 1) / Rational(n)));
  std::vector<Piece> phi;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto moved = transport(parts[k], parts[(k + 1) % parts.size()]);
    phi.insert(phi.end(), moved.begin(), moved.end());
  }
  return compose(from_partial(phi), t);
}

Iet tower_concatenate(const Iet& t, const Tower& tw1, const Tower& tw2) {
  if (tw1.base.measure() != tw2.base.measure())
    fail(ErrorKind::BaseMismatch, "tower bases have measures " + format_rational(tw1.base.measure()) + " and " +
                                      format_rational(tw2.base.measure()));
  if (!tower_support(tw1).disjoint_from(tower_support(tw2))) fail(ErrorKind::DomainError, "towers overlap");
  std::vector<Piece> phi = transport(tw1.base, tw2.base);
  const auto back = transport(tw2.base, tw1.base);
  phi.insert(phi.end(), back.begin(), back.end());
  return compose(from_partial(phi), t);
}

double liouville_log_radius(const Mat2& r, const Mat2& h, std::int64_t n, std::int64_t m) {
  const Mat2 rn = classify(r) == MatClass::Elliptic ? elliptic_power(conjugacy_normal_form(r), n) : power(r, n);
  if (classify(h) != MatClass::Hyperbolic) return log_spectral_radius(rn * power(h, m));
  const Eigendirections e = eigendirections(h);
  const double ux = std::cos(e.unstable.angle()), uy = std::sin(e.unstable.angle());
  const double sx = std::cos(e.stable.angle()), sy = std::sin(e.stable.angle());
  const double det = ux * sy - sx * uy;
  // Diagonal of V^-1 R^n V with V = [u s].
  const double alpha = (sy * (rn.a() * ux + rn.b() * uy) - sx * (rn.c() * ux + rn.d() * uy)) / det;
  const double delta = (-uy * (rn.a() * sx + rn.b() * sy) + ux * (rn.c() * sx + rn.d() * sy)) / det;
  const double log_lambda = std::log(std::fabs(e.lambda));
  const double md = static_cast<double>(m);
  const double inner = std::fabs(alpha + delta * std::exp(-2.0 * md * log_lambda));
  if (inner == 0.0) return 0.0;
  return log_radius_from_log_trace(md * log_lambda + std::log(inner));
}

std::optional<LiouvilleHit> liouville_search(const Mat2& r, const Mat2& h,
                                             const std::function<std::int64_t(std::int64_t)>& psi,
                                             double epsilon, std::int64_t n_max, bool shortcut, LiouvilleHit* best) {
  if (classify(r) != MatClass::Elliptic) fail(ErrorKind::NotElliptic, "R must be elliptic");
  auto value_at = [&](std::int64_t n) {
    const std::int64_t m = psi(n);
    if (m < 1) fail(ErrorKind::DomainError, "psi must be positive");
    return liouville_log_radius(r, h, n, m) / static_cast<double>(m);
  };
  if (shortcut && classify(h) != MatClass::Hyperbolic) {
    const LiouvilleHit hit{1, value_at(1)};
    if (best) *best = hit;
    return hit;
  }
  LiouvilleHit least{0, std::numeric_limits<double>::infinity()};
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double v = value_at(n);
    if (v < least.value) least = {n, v};
    if (v < epsilon) {
      if (best) *best = least;
      return LiouvilleHit{n, v};
    }
  }
  if (best) *best = least;
  return std::nullopt;
}

Mat2 interleaved_product(const std::vector<Mat2>& word, double theta) {
  const Mat2 rot = Mat2::rotation(theta);
  Mat2 p;
  for (const auto& m : word) p = rot * (m * p);
  return p;
}

std::optional<double> avila_theta_search(const std::vector<Mat2>& word, double theta_budget) {
  if (word.empty()) fail(ErrorKind::DomainError, "word must be non-empty");
  if (!(theta_budget > 0.0)) return std::nullopt;
  std::vector<double> grid;
  for (double x = 1e-8; x < theta_budget; x *= std::pow(2.0, 0.125)) grid.push_back(x);
  for (int i = 1; i <= 1024; ++i) grid.push_back(theta_budget * i / 1024.0);
  std::sort(grid.begin(), grid.end());
  double prev = 0.0;
  for (double mag : grid) {
    for (double sign : {1.0, -1.0}) {
      if (!is_elliptic_at(word, sign * mag)) continue;
      double lo = prev, hi = mag;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (is_elliptic_at(word, sign * mid)) hi = mid;
        else lo = mid;
      }
      return sign * hi;
    }
    prev = mag;
  }
  return std::nullopt;
}

BridgeSchedule hyperbolic_bridge_schedule(const Mat2& h, const Mat2& b1, const Mat2& b2, double delta, double c,
                                          std::int64_t ell_max, double angle_tol) {
  if (classify(h) != MatClass::Hyperbolic) fail(ErrorKind::NotHyperbolic, "H must be hyperbolic");
  if (!(delta > 0.0)) fail(ErrorKind::DomainError, "delta must be positive");
  if (log_spectral_radius(h) < 0.25 * delta)
    fail(ErrorKind::PreconditionViolation, "rho(H) < exp(delta/4); no bridge is needed");
  const Mat2 b = b2 * b1;
  if (h.norm() > c * (1.0 + 1e-12) || b.norm() > c * c * (1.0 + 1e-12))
    fail(ErrorKind::PreconditionViolation, "norm bound C violated");
  const Eigendirections e = eigendirections(h);
  const double err = angle_distance(act(b, e.unstable), e.stable);
  if (err > angle_tol) fail(ErrorKind::BridgeTooFar, "bridge misses e^s by " + std::to_string(err) + " rad");
  Mat2 hl;
  for (std::int64_t ell = 1; ell <= ell_max; ++ell) {
    try {
      hl = h * hl;
    } catch (const Error&) {
      break;
    }
    const Mat2 el = b * hl;
    if (classify(el) != MatClass::Elliptic) continue;
    const double bound = static_cast<double>(ell + 2) * delta / 2.0;
    std::int64_t p = elliptic_power_threshold(el, bound);
    auto k_of = [&](std::int64_t q) { return static_cast<double>((ell + 2) * q); };
    while (std::log(k_of(p) * (c + 1.0)) / k_of(p) >= 0.25 * delta) ++p;
    const double k = k_of(p);
    check(std::log(elliptic_power(conjugacy_normal_form(el), p).norm()) / k < 0.5 * delta,
          "bridge power bound failed");
    return {ell, p, (ell + 2) * p, el.trace(), err};
  }
  fail(ErrorKind::NoEllipticEll, "(B2 B1) H^l is not elliptic for l <= " + std::to_string(ell_max));
}

std::vector<std::vector<int>> frequency_word_scan(const Mat2& a1, const Mat2& a2, double p, double lambda,
                                                  std::int64_t n_max, std::uint64_t budget) {
  if (!(lambda > 1.0) || n_max < 1) fail(ErrorKind::DomainError, "need lambda > 1 and n_max >= 1");
  if (std::ldexp(1.0, static_cast<int>(std::min<std::int64_t>(n_max + 1, 1000))) - 2.0 > static_cast<double>(budget))
    fail(ErrorKind::BudgetExceeded, "2^n_max words exceed the budget " + std::to_string(budget));
  const double log_lambda = std::log(lambda);
  std::vector<std::vector<int>> out;
  std::vector<int> word;
  std::function<void(const Mat2&, int)> walk = [&](const Mat2& prefix, int twos) {
    for (int letter = 1; letter <= 2; ++letter) {
      const Mat2 q = prefix * (letter == 1 ? a1 : a2);
      word.push_back(letter);
      const int t = twos + (letter == 2 ? 1 : 0);
      const double n = static_cast<double>(word.size());
      if (t < p * n && std::log(q.norm()) <= n * log_lambda) out.push_back(word);
      if (static_cast<std::int64_t>(word.size()) < n_max) walk(q, t);
      word.pop_back();
    }
  };
  walk(Mat2(), 0);
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.size() < y.size() || (x.size() == y.size() && x < y);
  });
  return out;
}

}  // namespace cforge
