#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

namespace cforge {

/// Boundary tolerance on |trace| - 2 used by classify.
inline constexpr double kTolBoundary = 1e-9;
/// Products are rescaled by sqrt(det) once the determinant drifts past this.
inline constexpr double kRenormTol = 1e-12;
inline constexpr double kPi = 3.14159265358979323846;

/// 2x2 real matrix of unit determinant, row major [[a, b], [c, d]].
class Mat2 {
 public:
  /// Identity.
  Mat2() = default;
  /// Validates finiteness and unimodularity, then renormalizes small drift.
  Mat2(double a, double b, double c, double d);

  static Mat2 identity() { return Mat2(); }
  static Mat2 rotation(double theta);
  static Mat2 diag(double lambda);
  /// [[a, b], [0, 1/a]]
  static Mat2 upper(double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  std::array<double, 4> entries() const { return {a_, b_, c_, d_}; }

  double trace() const { return a_ + d_; }
  /// Determinant with a compensated product, accurate for the stored entries.
  double det() const;
  /// Spectral norm.
  double norm() const;
  Mat2 inverse() const { return raw(d_, -b_, -c_, a_); }

  friend Mat2 operator*(const Mat2& x, const Mat2& y);
  friend bool operator==(const Mat2& x, const Mat2& y) = default;

  /// Max-entry distance.
  double distance(const Mat2& other) const;

  std::string to_string() const;

 private:
  static Mat2 raw(double a, double b, double c, double d) {
    Mat2 m;
    m.a_ = a;
    m.b_ = b;
    m.c_ = c;
    m.d_ = d;
    return m;
  }
  void renormalize();

  double a_ = 1.0, b_ = 0.0, c_ = 0.0, d_ = 1.0;
};

/// Spectral norm of an arbitrary real 2x2 matrix.
double norm2(double a, double b, double c, double d);

/// Integer power by repeated squaring; negative n uses the inverse.
Mat2 power(const Mat2& m, std::int64_t n);

/// Point of the projective line, stored as an angle in [0, pi).
class ProjDir {
 public:
  ProjDir() = default;
  explicit ProjDir(double angle);
  double angle() const { return angle_; }

 private:
  double angle_ = 0.0;
};

/// Distance on P^1 = R / pi Z.
double angle_distance(double x, double y);
inline double angle_distance(ProjDir x, ProjDir y) { return angle_distance(x.angle(), y.angle()); }

enum class MatClass { Elliptic, Parabolic, Hyperbolic };
const char* class_name(MatClass c);

MatClass classify(const Mat2& m);
double spectral_radius(const Mat2& m);
/// log spectral_radius, computed without cancellation near |tr| = 2.
double log_spectral_radius(const Mat2& m);
/// Spectral radius as a function of the trace alone.
double spectral_radius_from_trace(double tr);

ProjDir act(const Mat2& m, ProjDir v);

struct Eigendirections {
  ProjDir unstable;
  ProjDir stable;
  double lambda;  ///< expanding eigenvalue, |lambda| > 1
};
Eigendirections eigendirections(const Mat2& h);

struct ConjugacyForm {
  Mat2 L;  ///< [[a, b], [0, 1/a]], a > 0
  double theta;
  int sign;
};
ConjugacyForm conjugacy_normal_form(const Mat2& e);

/// Condition number ||L|| ||L^-1|| of a unimodular matrix, i.e. ||L||^2.
double condition_number(const Mat2& m);

/// tr(R_theta * L R_theta L^-1) with L = [[a, b], [0, 1/a]].
double trace_conjugate_product(double theta, double a, double b);

/// Closed arc of P^1 running counterclockwise from `start` over `length` in (0, pi).
struct ProjInterval {
  double start = 0.0;
  double length = 0.0;

  static ProjInterval centered(double center, double half_width);
  double end() const;
  /// Counterclockwise offset of an angle from `start`, in [-tol, pi - tol).
  double offset(double angle) const;
  bool contains(double angle, double tol = 1e-12) const;
  bool contains_strictly(double angle, double tol = 1e-12) const;
};

/// Hilbert distance between two points of the arc given by their offsets.
double hilbert_distance(double length, double p, double q);

/// Birkhoff contraction factor for a projective map taking `source` onto the
/// arc [image_lo, image_hi] inside `target`; 1 when the image touches the boundary.
double birkhoff_tau(const ProjInterval& target, double image_lo_angle, double image_hi_angle);

/// Image arc of `source` under m, as offsets (lo, hi) inside `target`;
/// returns false when the image is not contained in the closed target arc.
bool image_offsets(const Mat2& m, const ProjInterval& source, const ProjInterval& target, double& lo,
                   double& hi, double tol = 1e-12);

double hilbert_contraction(const Mat2& b, const ProjInterval& interval);

std::int64_t elliptic_power_threshold(const Mat2& e, double bound);

}  // namespace cforge
