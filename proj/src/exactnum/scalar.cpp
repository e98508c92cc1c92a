#include "shiftlab/exactnum/scalar.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace shiftlab::exactnum {

Scalar Scalar::rational(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(q);
}

Scalar Scalar::from_double(double re, double im) {
  Scalar s;
  s.mode_ = Mode::Float;
  s.re_ = 0;
  s.im_ = 0;
  s.fre_ = re;
  s.fim_ = im;
  return s;
}

std::complex<double> Scalar::to_complex() const {
  if (mode_ == Mode::Float) return {fre_, fim_};
  return {re_.get_d(), im_.get_d()};
}

Scalar Scalar::to_float() const {
  if (mode_ == Mode::Float) return *this;
  return from_complex(to_complex());
}

bool Scalar::is_zero() const {
  if (mode_ == Mode::Float) return fre_ == 0.0 && fim_ == 0.0;
  return sgn(re_) == 0 && sgn(im_) == 0;
}

bool Scalar::is_real() const {
  if (mode_ == Mode::Float) return fim_ == 0.0;
  return sgn(im_) == 0;
}

int Scalar::real_sign() const {
  if (mode_ == Mode::Float) return (fre_ > 0.0) - (fre_ < 0.0);
  return sgn(re_);
}

double Scalar::abs() const { return std::abs(to_complex()); }

Scalar Scalar::abs2() const {
  if (mode_ == Mode::Float) return from_double(fre_ * fre_ + fim_ * fim_);
  if (sgn(im_) == 0) return Scalar(mpq_class(re_ * re_));
  return Scalar(mpq_class(re_ * re_ + im_ * im_));
}

Scalar Scalar::conj() const {
  Scalar s = *this;
  if (mode_ == Mode::Float) {
    s.fim_ = -s.fim_;
  } else if (sgn(im_) != 0) {
    s.im_ = -s.im_;
  }
  return s;
}

Scalar Scalar::operator-() const {
  Scalar s = *this;
  if (mode_ == Mode::Float) {
    s.fre_ = -s.fre_;
    s.fim_ = -s.fim_;
  } else {
    s.re_ = -s.re_;
    s.im_ = -s.im_;
  }
  return s;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  if (mode_ == Mode::Exact && o.mode_ == Mode::Exact) {
    if (sgn(o.re_) != 0) re_ += o.re_;
    if (sgn(o.im_) != 0) im_ += o.im_;
    return *this;
  }
  const auto a = to_complex() + o.to_complex();
  return *this = from_complex(a);
}

Scalar& Scalar::operator-=(const Scalar& o) {
  if (mode_ == Mode::Exact && o.mode_ == Mode::Exact) {
    if (sgn(o.re_) != 0) re_ -= o.re_;
    if (sgn(o.im_) != 0) im_ -= o.im_;
    return *this;
  }
  const auto a = to_complex() - o.to_complex();
  return *this = from_complex(a);
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (mode_ == Mode::Exact && o.mode_ == Mode::Exact) {
    Scalar acc;
    acc.fma(*this, o);
    return *this = std::move(acc);
  }
  const auto a = to_complex() * o.to_complex();
  return *this = from_complex(a);
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) throw std::domain_error("division by zero scalar");
  if (mode_ == Mode::Exact && o.mode_ == Mode::Exact) {
    if (sgn(o.im_) == 0) {
      re_ /= o.re_;
      if (sgn(im_) != 0) im_ /= o.re_;
      return *this;
    }
    const mpq_class den = o.re_ * o.re_ + o.im_ * o.im_;
    const mpq_class re = (re_ * o.re_ + im_ * o.im_) / den;
    const mpq_class im = (im_ * o.re_ - re_ * o.im_) / den;
    re_ = re;
    im_ = im;
    return *this;
  }
  const auto a = to_complex() / o.to_complex();
  return *this = from_complex(a);
}

void Scalar::fma(const Scalar& a, const Scalar& b) {
  if (a.mode_ == Mode::Exact && b.mode_ == Mode::Exact && mode_ == Mode::Exact) {
    const bool ar = sgn(a.re_) != 0, ai = sgn(a.im_) != 0;
    const bool br = sgn(b.re_) != 0, bi = sgn(b.im_) != 0;
    if (ar && br) re_ += a.re_ * b.re_;
    if (ai && bi) re_ -= a.im_ * b.im_;
    if (ar && bi) im_ += a.re_ * b.im_;
    if (ai && br) im_ += a.im_ * b.re_;
    return;
  }
  if (a.is_zero() || b.is_zero()) {
    if (mode_ == Mode::Exact && (a.mode_ == Mode::Float || b.mode_ == Mode::Float)) *this = to_float();
    return;
  }
  *this = from_complex(to_complex() + a.to_complex() * b.to_complex());
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (a.mode_ != b.mode_) return false;
  if (a.mode_ == Mode::Float) return a.fre_ == b.fre_ && a.fim_ == b.fim_;
  return a.re_ == b.re_ && a.im_ == b.im_;
}

bool Scalar::near(const Scalar& a, const Scalar& b, double tol) {
  if (a.is_exact() && b.is_exact()) return a == b;
  return std::abs(a.to_complex() - b.to_complex()) <= tol;
}

std::optional<Scalar> Scalar::exact_sqrt() const {
  if (mode_ != Mode::Exact || sgn(im_) != 0 || sgn(re_) < 0) return std::nullopt;
  const mpz_class& num = re_.get_num();
  const mpz_class& den = re_.get_den();
  if (mpz_perfect_square_p(num.get_mpz_t()) == 0 || mpz_perfect_square_p(den.get_mpz_t()) == 0) {
    return std::nullopt;
  }
  mpq_class root(sqrt(num), sqrt(den));
  root.canonicalize();
  return Scalar(root);
}

Scalar Scalar::sqrt_or_float() const {
  if (auto r = exact_sqrt()) return *r;
  return from_complex(std::sqrt(to_complex()));
}

std::string render_rational(const mpq_class& q) { return q.get_str(); }

std::string render_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string Scalar::str() const {
  if (mode_ == Mode::Float) {
    if (fim_ == 0.0) return render_double(fre_);
    std::string out = fre_ == 0.0 ? "" : render_double(fre_);
    if (!out.empty() && !std::signbit(fim_)) out += "+";
    return out + render_double(fim_) + "i";
  }
  if (sgn(im_) == 0) return render_rational(re_);
  std::string out = sgn(re_) == 0 ? "" : render_rational(re_);
  if (!out.empty() && sgn(im_) > 0) out += "+";
  return out + render_rational(im_) + "i";
}

std::optional<mpq_class> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    if (auto slash = text.find('/'); slash != std::string::npos) {
      mpz_class num(text.substr(0, slash), 10);
      mpz_class den(text.substr(slash + 1), 10);
      if (den == 0) return std::nullopt;
      mpq_class q(num, den);
      q.canonicalize();
      return q;
    }
    std::string mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string::npos) {
      mantissa = text.substr(0, e);
      exponent = std::stol(text.substr(e + 1));
    }
    std::string digits;
    long frac_len = 0;
    bool seen_dot = false;
    for (char c : mantissa) {
      if (c == '.') {
        if (seen_dot) return std::nullopt;
        seen_dot = true;
      } else {
        if (seen_dot) ++frac_len;
        digits += c;
      }
    }
    if (digits.empty() || digits == "-" || digits == "+") return std::nullopt;
    if (digits[0] == '+') digits.erase(0, 1);
    mpz_class num(digits, 10);
    const long shift = exponent - frac_len;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    mpq_class q = shift < 0 ? mpq_class(num, scale) : mpq_class(num * scale);
    q.canonicalize();
    return q;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace shiftlab::exactnum
