#pragma once

#include <complex>
#include <optional>
#include <string>

#include <gmpxx.h>

namespace shiftlab::exactnum {

enum class Mode { Exact, Float };

/// Complex scalar in one of two modes: exact (pair of GMP rationals) or
/// binary floating point. Mixed-mode arithmetic promotes to Float.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  Scalar(const mpq_class& re, const mpq_class& im = 0) : re_(re), im_(im) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static Scalar rational(long num, long den);
  static Scalar complex(const mpq_class& re, const mpq_class& im) { return {re, im}; }
  static Scalar from_double(double re, double im = 0.0);
  static Scalar from_complex(std::complex<double> z) { return from_double(z.real(), z.imag()); }
  static Scalar zero(Mode mode) { return mode == Mode::Exact ? Scalar() : from_double(0.0); }
  static Scalar one(Mode mode) { return mode == Mode::Exact ? Scalar(1) : from_double(1.0); }

  Mode mode() const { return mode_; }
  bool is_exact() const { return mode_ == Mode::Exact; }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }
  std::complex<double> to_complex() const;
  Scalar to_float() const;

  /// Exactly zero (Exact) or bitwise zero (Float).
  bool is_zero() const;
  bool is_real() const;
  /// Sign of the real part: exact in Exact mode, plain comparison in Float.
  int real_sign() const;
  /// |z| as a double, |z|² exactly.
  double abs() const;
  Scalar abs2() const;

  Scalar conj() const;
  Scalar operator-() const;

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  /// Structural equality: same mode and same value. Float values compare bitwise.
  friend bool operator==(const Scalar& a, const Scalar& b);

  /// |a - b| <= tol in Float; exact equality when both are Exact.
  static bool near(const Scalar& a, const Scalar& b, double tol);

  /// Square root of a nonnegative real rational that is a perfect square of a rational.
  std::optional<Scalar> exact_sqrt() const;
  /// Square root in either mode; Exact inputs that are not perfect squares yield Float.
  Scalar sqrt_or_float() const;

  /// Canonical rendering: "p/q", "a+bi", or the shortest round-trip decimal.
  std::string str() const;

  // Adds a*b into *this. Hot path of every matrix kernel.
  void fma(const Scalar& a, const Scalar& b);

 private:
  Mode mode_ = Mode::Exact;
  mpq_class re_ = 0;
  mpq_class im_ = 0;
  double fre_ = 0.0;
  double fim_ = 0.0;
};

std::string render_rational(const mpq_class& q);
std::string render_double(double x);

/// Parses "p/q", "p", or a finite decimal ("0.25", "-1.5e-3") into an exact rational.
std::optional<mpq_class> parse_rational(const std::string& text);

}  // namespace shiftlab::exactnum
