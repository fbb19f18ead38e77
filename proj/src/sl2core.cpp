#include "cforge/sl2.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "cforge/errors.hpp"

namespace cforge {

namespace {

// a*d - b*c with one rounding error (Kahan).
double diff_of_products(double a, double d, double b, double c) {
  const double w = b * c;
  const double e = std::fma(-b, c, w);
  const double f = std::fma(a, d, -w);
  return f + e;
}

double frob2(double a, double b, double c, double d) { return a * a + b * b + c * c + d * d; }

double normalize_angle(double x) {
  double r = std::fmod(x, kPi);
  if (r < 0) r += kPi;
  if (r >= kPi) r -= kPi;
  return r;
}

}  // namespace

Mat2::Mat2(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
    fail(ErrorKind::DomainError, "matrix entries must be finite");
  const double det = this->det();
  if (std::fabs(det - 1.0) > 1e-9 * std::max(1.0, frob2(a, b, c, d)))
    fail(ErrorKind::DomainError, "matrix is not unimodular (det = " + std::to_string(det) + ")");
  renormalize();
}

Mat2 Mat2::rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return raw(c, -s, s, c);
}

Mat2 Mat2::diag(double lambda) {
  if (!(lambda != 0.0) || !std::isfinite(lambda)) fail(ErrorKind::DomainError, "diag needs a finite nonzero entry");
  return raw(lambda, 0.0, 0.0, 1.0 / lambda);
}

Mat2 Mat2::upper(double a, double b) {
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b)) fail(ErrorKind::DomainError, "upper needs a > 0");
  return raw(a, b, 0.0, 1.0 / a);
}

double Mat2::det() const { return diff_of_products(a_, d_, b_, c_); }

double Mat2::norm() const { return norm2(a_, b_, c_, d_); }

void Mat2::renormalize() {
  const double det = this->det();
  // Rounding error of det itself; below it the drift is not measurable.
  const double noise = 8.0 * std::numeric_limits<double>::epsilon() * (std::fabs(a_ * d_) + std::fabs(b_ * c_));
  if (std::fabs(det - 1.0) > std::max(kRenormTol, noise) && det > 0.0) {
    const double s = 1.0 / std::sqrt(det);
    a_ *= s;
    b_ *= s;
    c_ *= s;
    d_ *= s;
  }
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
  Mat2 r = Mat2::raw(x.a_ * y.a_ + x.b_ * y.c_, x.a_ * y.b_ + x.b_ * y.d_, x.c_ * y.a_ + x.d_ * y.c_,
                     x.c_ * y.b_ + x.d_ * y.d_);
  if (!std::isfinite(r.a_) || !std::isfinite(r.b_) || !std::isfinite(r.c_) || !std::isfinite(r.d_))
    fail(ErrorKind::DomainError, "matrix product overflowed");
  r.renormalize();
  return r;
}

double Mat2::distance(const Mat2& o) const {
  return std::max(std::max(std::fabs(a_ - o.a_), std::fabs(b_ - o.b_)),
                  std::max(std::fabs(c_ - o.c_), std::fabs(d_ - o.d_)));
}

std::string Mat2::to_string() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "[[%.17g, %.17g], [%.17g, %.17g]]", a_, b_, c_, d_);
  return buf;
}

double norm2(double a, double b, double c, double d) {
  return 0.5 * (std::hypot(a + d, c - b) + std::hypot(a - d, b + c));
}

Mat2 power(const Mat2& m, std::int64_t n) {
  Mat2 base = n < 0 ? m.inverse() : m;
  std::uint64_t e = n < 0 ? static_cast<std::uint64_t>(-n) : static_cast<std::uint64_t>(n);
  Mat2 acc;
  while (e) {
    if (e & 1u) acc = base * acc;
    e >>= 1u;
    if (e) base = base * base;
  }
  return acc;
}

ProjDir::ProjDir(double angle) : angle_(normalize_angle(angle)) {}

double angle_distance(double x, double y) {
  const double r = normalize_angle(x - y);
  return std::min(r, kPi - r);
}

const char* class_name(MatClass c) {
  switch (c) {
    case MatClass::Elliptic: return "Elliptic";
    case MatClass::Parabolic: return "Parabolic";
    case MatClass::Hyperbolic: return "Hyperbolic";
  }
  return "Unknown";
}

MatClass classify(const Mat2& m) {
  const double t = std::fabs(m.trace());
  if (t < 2.0 - kTolBoundary) return MatClass::Elliptic;
  if (t > 2.0 + kTolBoundary) return MatClass::Hyperbolic;
  return MatClass::Parabolic;
}

double spectral_radius_from_trace(double tr) {
  const double t = std::fabs(tr);
  if (t < 2.0) return 1.0;
  const double h = 0.5 * t;
  return h + std::sqrt((h - 1.0) * (h + 1.0));
}

double spectral_radius(const Mat2& m) { return spectral_radius_from_trace(m.trace()); }

double log_spectral_radius(const Mat2& m) {
  const double t = std::fabs(m.trace());
  if (t < 2.0) return 0.0;
  return std::acosh(0.5 * t);
}

ProjDir act(const Mat2& m, ProjDir v) {
  const double x = std::cos(v.angle()), y = std::sin(v.angle());
  return ProjDir(std::atan2(m.c() * x + m.d() * y, m.a() * x + m.b() * y));
}

Eigendirections eigendirections(const Mat2& h) {
  const double t = h.trace();
  if (std::fabs(t) <= 2.0 + kTolBoundary) fail(ErrorKind::NotHyperbolic, "matrix is not hyperbolic");
  const double disc = std::sqrt((0.5 * t - 1.0) * (0.5 * t + 1.0));
  const double lu = t > 0 ? 0.5 * t + disc : 0.5 * t - disc;
  const double ls = 1.0 / lu;
  auto eigvec = [&](double lam) {
    const double x1 = h.b(), y1 = lam - h.a();
    const double x2 = lam - h.d(), y2 = h.c();
    if (std::hypot(x1, y1) >= std::hypot(x2, y2)) return ProjDir(std::atan2(y1, x1));
    return ProjDir(std::atan2(y2, x2));
  };
  return {eigvec(lu), eigvec(ls), lu};
}

ConjugacyForm conjugacy_normal_form(const Mat2& e) {
  if (classify(e) != MatClass::Elliptic) fail(ErrorKind::NotElliptic, "matrix is not elliptic");
  const double theta = std::acos(0.5 * e.trace());
  const double s = std::sin(theta);
  const int sign = e.c() > 0 ? 1 : -1;
  const double a = std::sqrt(s / std::fabs(e.c()));
  const double b = (e.a() - std::cos(theta)) * a / (sign * s);
  return {Mat2::upper(a, b), theta, sign};
}

double condition_number(const Mat2& m) {
  const double n = m.norm();
  return n * n;
}

double trace_conjugate_product(double theta, double a, double b) {
  if (!(a > 0.0)) fail(ErrorKind::DomainError, "trace_conjugate_product needs a > 0");
  const double s = std::sin(theta);
  return 2.0 - (2.0 + a * a + 1.0 / (a * a) + b * b) * s * s;
}

ProjInterval ProjInterval::centered(double center, double half_width) {
  return {normalize_angle(center - half_width), 2.0 * half_width};
}

double ProjInterval::end() const { return normalize_angle(start + length); }

double ProjInterval::offset(double angle) const {
  double o = normalize_angle(angle - start);
  if (o >= kPi - 1e-12) o -= kPi;
  return o;
}

bool ProjInterval::contains(double angle, double tol) const {
  const double o = offset(angle);
  return o >= -tol && o <= length + tol;
}

bool ProjInterval::contains_strictly(double angle, double tol) const {
  const double o = offset(angle);
  return o > tol && o < length - tol;
}

double hilbert_distance(double length, double p, double q) {
  if (p > q) std::swap(p, q);
  return std::log((std::sin(q) * std::sin(length - p)) / (std::sin(p) * std::sin(length - q)));
}

bool image_offsets(const Mat2& m, const ProjInterval& source, const ProjInterval& target, double& lo, double& hi,
                   double tol) {
  lo = target.offset(act(m, ProjDir(source.start)).angle());
  hi = target.offset(act(m, ProjDir(source.start + source.length)).angle());
  return lo >= -tol && hi <= target.length + tol && lo <= hi + tol;
}

double birkhoff_tau(const ProjInterval& target, double lo, double hi) {
  const double tol = 1e-12;
  if (lo <= tol || hi >= target.length - tol) return 1.0;
  const double diam = hilbert_distance(target.length, lo, hi);
  if (diam <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::tanh(0.25 * diam);
}

double hilbert_contraction(const Mat2& b, const ProjInterval& interval) {
  double lo = 0.0, hi = 0.0;
  if (!image_offsets(b, interval, interval, lo, hi)) fail(ErrorKind::NotInvariant, "B(I) is not contained in I");
  return birkhoff_tau(interval, lo, hi);
}

std::int64_t elliptic_power_threshold(const Mat2& e, double bound) {
  if (!(bound > 0.0)) fail(ErrorKind::DomainError, "bound must be positive");
  const ConjugacyForm f = conjugacy_normal_form(e);
  const double log_cond = std::log(condition_number(f.L));
  const Mat2 linv = f.L.inverse();
  const std::int64_t p0 = static_cast<std::int64_t>(std::floor(log_cond / bound)) + 1;
  for (std::int64_t p = p0 - 1; p >= 1; --p) {
    const Mat2 ep = f.L * Mat2::rotation(f.sign * f.theta * static_cast<double>(p)) * linv;
    if (std::log(ep.norm()) / static_cast<double>(p) >= bound) return p + 1;
  }
  return 1;
}

}  // namespace cforge
