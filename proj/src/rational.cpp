#include "cforge/rational.hpp"

#include <algorithm>
#include <cctype>

#include "cforge/errors.hpp"

namespace cforge {

namespace {

bool is_integer_text(const std::string& s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  std::string num = text.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!num.empty() && num[0] == '+') num = num.substr(1);
  if (!is_integer_text(num) || !is_integer_text(den) || den[0] == '-' || den[0] == '+')
    fail(ErrorKind::ParseError, "not a rational: '" + text + "'");
  mpz_class n(num), d(den);
  if (d == 0) fail(ErrorKind::ParseError, "zero denominator: '" + text + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

IntervalSet::IntervalSet(std::vector<Interval> parts) {
  parts.erase(std::remove_if(parts.begin(), parts.end(), [](const Interval& i) { return i.empty(); }), parts.end());
  std::sort(parts.begin(), parts.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (auto& p : parts) {
    if (!parts_.empty() && p.lo <= parts_.back().hi) {
      if (p.hi > parts_.back().hi) parts_.back().hi = p.hi;
    } else {
      parts_.push_back(std::move(p));
    }
  }
}

Rational IntervalSet::measure() const {
  Rational m(0);
  for (const auto& p : parts_) m += p.length();
  return m;
}

bool IntervalSet::contains(const Rational& x) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                             [](const Rational& v, const Interval& i) { return v < i.lo; });
  if (it == parts_.begin()) return false;
  --it;
  return it->contains(x);
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> all = parts_;
  all.insert(all.end(), other.parts_.begin(), other.parts_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < parts_.size() && j < other.parts_.size()) {
    const auto& x = parts_[i];
    const auto& y = other.parts_[j];
    Rational lo = std::max(x.lo, y.lo), hi = std::min(x.hi, y.hi);
    if (lo < hi) out.push_back({lo, hi});
    if (x.hi < y.hi) ++i;
    else ++j;
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::subtract(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t j = 0;
  for (const auto& x : parts_) {
    Rational cur = x.lo;
    while (j < other.parts_.size() && other.parts_[j].hi <= cur) ++j;
    std::size_t k = j;
    while (k < other.parts_.size() && other.parts_[k].lo < x.hi) {
      if (other.parts_[k].lo > cur) out.push_back({cur, other.parts_[k].lo});
      if (other.parts_[k].hi > cur) cur = other.parts_[k].hi;
      if (cur >= x.hi) break;
      ++k;
    }
    if (cur < x.hi) out.push_back({cur, x.hi});
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::translate(const Rational& shift) const {
  std::vector<Interval> out;
  out.reserve(parts_.size());
  for (const auto& p : parts_) out.push_back({p.lo + shift, p.hi + shift});
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::slice_by_measure(const Rational& from, const Rational& to) const {
  std::vector<Interval> out;
  Rational acc(0);
  for (const auto& p : parts_) {
    const Rational len = p.length();
    const Rational lo = std::max(from, acc), hi = std::min<Rational>(to, acc + len);
    if (lo < hi) out.push_back({p.lo + (lo - acc), p.lo + (hi - acc)});
    acc += len;
    if (acc >= to) break;
  }
  return IntervalSet(std::move(out));
}

}  // namespace cforge
