#include "cforge/dynamics.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "cforge/errors.hpp"

namespace cforge {

namespace {

bool by_lo(const Piece& x, const Piece& y) { return x.lo < y.lo; }

void require_partition(const std::vector<Interval>& sorted, const char* what) {
  Rational cur(0);
  for (const auto& i : sorted) {
    if (i.lo != cur || !(i.lo < i.hi)) fail(ErrorKind::DomainError, std::string(what) + " do not partition [0,1)");
    cur = i.hi;
  }
  if (cur != 1) fail(ErrorKind::DomainError, std::string(what) + " do not partition [0,1)");
}

// Calls f(lo, hi, inside) for the consecutive segments of [a, b) cut by `set`.
template <class F>
void for_each_segment(const IntervalSet& set, const Rational& a, const Rational& b, F&& f) {
  const auto& parts = set.parts();
  auto it = std::upper_bound(parts.begin(), parts.end(), a,
                             [](const Rational& v, const Interval& i) { return v < i.lo; });
  if (it != parts.begin() && std::prev(it)->hi > a) --it;
  Rational cur = a;
  for (; it != parts.end() && it->lo < b && cur < b; ++it) {
    if (it->lo > cur) {
      f(cur, it->lo, false);
      cur = it->lo;
    }
    Rational hi = std::min(it->hi, b);
    if (hi > cur) {
      f(cur, hi, true);
      cur = hi;
    }
  }
  if (cur < b) f(cur, b, false);
}

}  // namespace

Iet::Iet() { pieces_.push_back({Rational(0), Rational(1), Rational(0)}); }

Iet::Iet(std::vector<Piece> pieces) {
  std::sort(pieces.begin(), pieces.end(), by_lo);
  std::vector<Interval> dom, img;
  dom.reserve(pieces.size());
  img.reserve(pieces.size());
  for (const auto& p : pieces) {
    dom.push_back({p.lo, p.hi});
    img.push_back({p.lo + p.shift, p.hi + p.shift});
  }
  require_partition(dom, "pieces");
  std::sort(img.begin(), img.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  require_partition(img, "image pieces");
  for (auto& p : pieces) {
    if (!pieces_.empty() && pieces_.back().shift == p.shift && pieces_.back().hi == p.lo) {
      pieces_.back().hi = p.hi;
    } else {
      pieces_.push_back(std::move(p));
    }
  }
}

Iet Iet::rotation(const Rational& r) {
  Rational s = r - Rational(mpz_class(r.get_num() / r.get_den()));
  if (s < 0) s += 1;
  if (s == 0) return Iet();
  return Iet({{Rational(0), 1 - s, s}, {1 - s, Rational(1), s - 1}});
}

Iet Iet::from_breakpoints(const std::vector<Rational>& breakpoints, const std::vector<Rational>& offsets) {
  if (breakpoints.size() != offsets.size() || breakpoints.empty())
    fail(ErrorKind::DomainError, "breakpoints and offsets must have equal nonzero length");
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    Rational hi = i + 1 < breakpoints.size() ? breakpoints[i + 1] : Rational(1);
    pieces.push_back({breakpoints[i], hi, offsets[i]});
  }
  return Iet(std::move(pieces));
}

std::vector<Rational> Iet::breakpoints() const {
  std::vector<Rational> out;
  for (const auto& p : pieces_) out.push_back(p.lo);
  return out;
}

std::vector<Rational> Iet::offsets() const {
  std::vector<Rational> out;
  for (const auto& p : pieces_) out.push_back(p.shift);
  return out;
}

std::size_t Iet::piece_index(const Rational& x) const {
  if (x < 0 || x >= 1) fail(ErrorKind::DomainError, "point outside [0,1)");
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](const Rational& v, const Piece& p) { return v < p.lo; });
  return static_cast<std::size_t>(std::distance(pieces_.begin(), it)) - 1;
}

const Piece& Iet::piece_at(const Rational& x) const { return pieces_[piece_index(x)]; }

Rational Iet::operator()(const Rational& x) const { return x + piece_at(x).shift; }

IntervalSet Iet::image(const IntervalSet& set) const {
  std::vector<Interval> out;
  for (const auto& part : set.parts()) {
    Rational x = part.lo;
    std::size_t k = piece_index(x);
    while (x < part.hi) {
      const Piece& p = pieces_[k];
      Rational end = std::min(p.hi, part.hi);
      out.push_back({x + p.shift, end + p.shift});
      x = end;
      ++k;
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet Iet::preimage(const IntervalSet& set) const { return invert(*this).image(set); }

bool operator==(const Iet& x, const Iet& y) {
  if (x.pieces_.size() != y.pieces_.size()) return false;
  for (std::size_t i = 0; i < x.pieces_.size(); ++i) {
    const auto &p = x.pieces_[i], &q = y.pieces_[i];
    if (p.lo != q.lo || p.hi != q.hi || p.shift != q.shift) return false;
  }
  return true;
}

Iet compose(const Iet& s, const Iet& t) {
  std::vector<Piece> out;
  for (const auto& p : t.pieces()) {
    Rational x = p.lo + p.shift;
    const Rational end = p.hi + p.shift;
    std::size_t k = s.piece_index(x);
    while (x < end) {
      const Piece& q = s.pieces()[k];
      Rational hi = std::min(q.hi, end);
      out.push_back({x - p.shift, hi - p.shift, p.shift + q.shift});
      x = hi;
      ++k;
    }
  }
  return Iet(std::move(out));
}

Iet invert(const Iet& t) {
  std::vector<Piece> out;
  for (const auto& p : t.pieces()) out.push_back({p.lo + p.shift, p.hi + p.shift, -p.shift});
  return Iet(std::move(out));
}

Iet iterate(const Iet& t, std::int64_t n) {
  if (n < 0) fail(ErrorKind::DomainError, "iterate needs n >= 0");
  Iet acc, base = t;
  while (n) {
    if (n & 1) acc = compose(base, acc);
    n >>= 1;
    if (n) base = compose(base, base);
  }
  return acc;
}

bool is_cyclic_permutation(const std::vector<std::size_t>& sigma) {
  if (sigma.empty()) return false;
  std::size_t j = 0, len = 0;
  do {
    j = sigma[j];
    ++len;
  } while (j != 0 && len <= sigma.size());
  return j == 0 && len == sigma.size();
}

RankedPermutation iet_from_permutation(std::size_t M, const std::vector<std::size_t>& sigma) {
  if (M == 0 || sigma.size() != M) fail(ErrorKind::InvalidPermutation, "permutation size must equal the rank");
  std::vector<char> seen(M, 0);
  for (auto v : sigma) {
    if (v >= M || seen[v]) fail(ErrorKind::InvalidPermutation, "sigma is not a bijection of {0..M-1}");
    seen[v] = 1;
  }
  std::vector<Piece> pieces;
  pieces.reserve(M);
  const Rational m(static_cast<long>(M));
  for (std::size_t j = 0; j < M; ++j) {
    pieces.push_back({Rational(static_cast<long>(j)) / m, Rational(static_cast<long>(j + 1)) / m,
                      Rational(static_cast<long>(sigma[j]) - static_cast<long>(j)) / m});
  }
  return {Iet(std::move(pieces)), M, sigma, is_cyclic_permutation(sigma)};
}

RankedPermutation as_interval_permutation(const Iet& t, std::size_t M) {
  if (M == 0) fail(ErrorKind::NotIntervalPermutation, "rank must be positive");
  const Rational m(static_cast<long>(M));
  std::vector<std::size_t> sigma(M);
  for (std::size_t j = 0; j < M; ++j) {
    const Rational lo = Rational(static_cast<long>(j)) / m, hi = Rational(static_cast<long>(j + 1)) / m;
    const Piece& p = t.piece_at(lo);
    const Rational steps = p.shift * m;
    if (p.hi < hi || steps.get_den() != 1)
      fail(ErrorKind::NotIntervalPermutation, "map is not an interval permutation of rank " + std::to_string(M));
    sigma[j] = static_cast<std::size_t>(static_cast<long>(j) + steps.get_num().get_si());
  }
  return {t, M, sigma, is_cyclic_permutation(sigma)};
}

std::size_t minimal_rank(const Iet& t) {
  mpz_class l = 1;
  for (const auto& p : t.pieces()) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), p.lo.get_den().get_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), p.shift.get_den().get_mpz_t());
  }
  if (!l.fits_slong_p() || l.get_si() > (1L << 40)) fail(ErrorKind::SizeOverflow, "rank too large");
  return static_cast<std::size_t>(l.get_si());
}

Rational weak_distance(const Iet& s, const Iet& t) {
  std::vector<Rational> cuts;
  for (const auto& p : s.pieces()) cuts.push_back(p.lo);
  for (const auto& p : t.pieces()) cuts.push_back(p.lo);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::map<Rational, Rational> mass;  // displacement -> measure
  Rational total(0);
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const Rational hi = i + 1 < cuts.size() ? cuts[i + 1] : Rational(1);
    Rational disp = abs(Rational(s.piece_at(cuts[i]).shift - t.piece_at(cuts[i]).shift));
    if (disp > 0) {
      mass[disp] += hi - cuts[i];
      total += hi - cuts[i];
    }
  }
  if (mass.empty()) return Rational(0);
  Rational prev(0), tail = total;
  for (const auto& [v, w] : mass) {
    // On [prev, v) the measure of {|S-T| > rho} equals tail.
    Rational cand = std::max(prev, tail);
    if (cand < v && cand > 0) return cand;
    if (cand < v && cand == 0) return Rational(0);
    tail -= w;
    prev = v;
  }
  return prev;
}

FirstReturn first_return(const Iet& t, const IntervalSet& w, std::size_t cap, const std::vector<Rational>* refine) {
  if (w.measure() <= 0) fail(ErrorKind::DomainError, "W must have positive measure");
  struct Item {
    Rational lo, hi, s;
    std::int64_t n;
  };
  std::vector<Item> stack;
  for (auto it = w.parts().rbegin(); it != w.parts().rend(); ++it) stack.push_back({it->lo, it->hi, Rational(0), 0});
  std::vector<ReturnPiece> done;
  std::vector<Interval> visited;
  std::size_t steps = 0;
  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    if (++steps > cap) fail(ErrorKind::NonPeriodicBase, "return undecided within the iteration cap");
    const Rational plo = item.lo + item.s, phi = item.hi + item.s;
    visited.push_back({plo, phi});
    Rational x = plo;
    std::size_t k = t.piece_index(x);
    while (x < phi) {
      const Piece& p = t.pieces()[k];
      Rational end = std::min(p.hi, phi);
      if (refine) {
        auto r = std::upper_bound(refine->begin(), refine->end(), x);
        if (r != refine->end() && *r < end) end = *r;
      }
      const Rational ns = item.s + p.shift;
      for_each_segment(w, x + p.shift, end + p.shift, [&](const Rational& a, const Rational& b, bool inside) {
        Rational dlo = a - ns, dhi = b - ns;
        if (inside) done.push_back({dlo, dhi, ns, item.n + 1});
        else stack.push_back({dlo, dhi, ns, item.n + 1});
      });
      x = end;
      if (x >= p.hi) ++k;
    }
  }
  std::sort(done.begin(), done.end(), [](const ReturnPiece& a, const ReturnPiece& b) { return a.lo < b.lo; });
  FirstReturn out;
  std::vector<Piece> partial;
  Rational kac(0);
  for (const auto& d : done) {
    partial.push_back({d.lo, d.hi, d.shift});
    out.return_time.parts.push_back({d.lo, d.hi, d.time});
    kac += (d.hi - d.lo) * Rational(static_cast<long>(d.time));
  }
  out.map = from_partial(partial);
  out.saturation = IntervalSet(std::move(visited));
  check(kac == out.saturation.measure(), "Kac identity failed in first_return");
  out.pieces = std::move(done);
  return out;
}

std::vector<Tower> cyclic_towers(const Iet& t, std::size_t M) {
  const RankedPermutation rp = as_interval_permutation(t, M);
  const Rational m(static_cast<long>(M));
  auto cell = [&](std::size_t j) {
    return IntervalSet({{Rational(static_cast<long>(j)) / m, Rational(static_cast<long>(j + 1)) / m}});
  };
  std::vector<char> seen(M, 0);
  std::vector<Tower> towers;
  for (std::size_t j = 0; j < M; ++j) {
    if (seen[j]) continue;
    Tower tw;
    tw.base = cell(j);
    std::size_t i = j;
    do {
      seen[i] = 1;
      tw.levels.push_back(cell(i));
      i = rp.sigma[i];
    } while (i != j);
    tw.height = tw.levels.size();
    towers.push_back(std::move(tw));
  }
  return towers;
}

Tower tower_from_base(const Iet& t, const IntervalSet& base, std::size_t max_height) {
  const FirstReturn fr = first_return(t, base, max_height * std::max<std::size_t>(1, base.parts().size()) * 64);
  std::int64_t h = -1;
  for (const auto& p : fr.pieces) {
    if (p.shift != 0 || (h >= 0 && p.time != h))
      fail(ErrorKind::PreconditionViolation, "base does not carry a cyclic tower");
    h = p.time;
  }
  Tower tw;
  tw.base = base;
  tw.height = static_cast<std::size_t>(h);
  IntervalSet level = base;
  for (std::size_t i = 0; i < tw.height; ++i) {
    tw.levels.push_back(level);
    level = t.image(level);
  }
  return tw;
}

IntervalSet tower_support(const Tower& tower) {
  IntervalSet s;
  for (const auto& l : tower.levels) s = s.unite(l);
  return s;
}

bool is_cyclic_tower(const Iet& t, const Tower& tower) {
  if (tower.height == 0 || tower.levels.size() != tower.height || !(tower.levels.front() == tower.base)) return false;
  Rational sum(0);
  for (std::size_t i = 0; i < tower.height; ++i) {
    sum += tower.levels[i].measure();
    const IntervalSet& next = i + 1 < tower.height ? tower.levels[i + 1] : tower.base;
    if (!(t.image(tower.levels[i]) == next)) return false;
  }
  if (sum != tower_support(tower).measure()) return false;
  const FirstReturn fr = first_return(t, tower.base);
  for (const auto& p : fr.pieces)
    if (p.shift != 0 || p.time != static_cast<std::int64_t>(tower.height)) return false;
  return true;
}

std::vector<Piece> transport(const IntervalSet& from, const IntervalSet& to) {
  if (from.measure() != to.measure()) fail(ErrorKind::BaseMismatch, "transport needs sets of equal measure");
  std::vector<Piece> out;
  const auto &a = from.parts(), &b = to.parts();
  std::size_t i = 0, j = 0;
  Rational ai = a.empty() ? Rational(0) : a[0].lo, bj = b.empty() ? Rational(0) : b[0].lo;
  while (i < a.size() && j < b.size()) {
    const Rational len = std::min(a[i].hi - ai, b[j].hi - bj);
    out.push_back({ai, ai + len, bj - ai});
    ai += len;
    bj += len;
    if (ai == a[i].hi && ++i < a.size()) ai = a[i].lo;
    if (bj == b[j].hi && ++j < b.size()) bj = b[j].lo;
  }
  return out;
}

Iet from_partial(const std::vector<Piece>& pieces) {
  std::vector<Interval> dom;
  for (const auto& p : pieces) dom.push_back({p.lo, p.hi});
  const IntervalSet rest = IntervalSet(dom).complement();
  std::vector<Piece> all = pieces;
  for (const auto& r : rest.parts()) all.push_back({r.lo, r.hi, Rational(0)});
  return Iet(std::move(all));
}

}  // namespace cforge
