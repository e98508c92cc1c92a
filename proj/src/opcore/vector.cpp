#include "shiftlab/opcore/vector.hpp"

#include <sstream>

namespace shiftlab::opcore {

std::string SpaceShape::str() const {
  std::ostringstream os;
  os << "l2(" << p << ")";
  if (q) os << "(+)C(" << q << ")";
  return os.str();
}

std::string Coord::str() const {
  std::ostringstream os;
  if (tail) {
    os << "t" << index;
  } else {
    os << index << "," << level;
  }
  return os.str();
}

FinSupportVector FinSupportVector::basis(SpaceShape shape, const Coord& c) {
  FinSupportVector v(shape);
  v.ref(c) = Scalar(1);
  return v;
}

FinSupportVector FinSupportVector::from_window(SpaceShape shape, std::size_t levels, const FinVector& w) {
  if (w.size() != shape.dim(levels)) throw ShapeMismatch("from_window: length does not match the window");
  FinSupportVector v(shape);
  v.levels_ = levels;
  v.strands_.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(levels * shape.p));
  v.tail_.assign(w.begin() + static_cast<std::ptrdiff_t>(levels * shape.p), w.end());
  v.trim();
  return v;
}

Scalar FinSupportVector::at(const Coord& c) const {
  if (c.tail) {
    if (c.index >= shape_.q) throw ShapeMismatch("tail index out of range");
    return tail_[c.index];
  }
  if (c.index >= shape_.p) throw ShapeMismatch("strand index out of range");
  if (c.level >= levels_) return Scalar();
  return strands_[c.level * shape_.p + c.index];
}

Scalar& FinSupportVector::ref(const Coord& c) {
  if (c.tail) {
    if (c.index >= shape_.q) throw ShapeMismatch("tail index out of range");
    return tail_[c.index];
  }
  if (c.index >= shape_.p) throw ShapeMismatch("strand index out of range");
  grow(c.level + 1);
  return strands_[c.level * shape_.p + c.index];
}

FinVector FinSupportVector::window(std::size_t levels) const {
  FinVector w(shape_.dim(levels));
  const std::size_t keep = std::min(levels, levels_) * shape_.p;
  std::copy(strands_.begin(), strands_.begin() + static_cast<std::ptrdiff_t>(keep), w.begin());
  std::copy(tail_.begin(), tail_.end(), w.begin() + static_cast<std::ptrdiff_t>(levels * shape_.p));
  return w;
}

void FinSupportVector::grow(std::size_t levels) {
  if (levels <= levels_) return;
  levels_ = levels;
  strands_.resize(levels * shape_.p);
}

void FinSupportVector::trim() {
  while (levels_ > 0) {
    bool zero = true;
    for (std::size_t s = 0; s < shape_.p && zero; ++s) zero = strands_[(levels_ - 1) * shape_.p + s].is_zero();
    if (!zero) break;
    --levels_;
  }
  strands_.resize(levels_ * shape_.p);
}

bool FinSupportVector::is_zero() const { return exactnum::is_zero(strands_) && exactnum::is_zero(tail_); }

FinSupportVector& FinSupportVector::operator+=(const FinSupportVector& o) {
  add_scaled(Scalar(1), o);
  return *this;
}

FinSupportVector& FinSupportVector::operator-=(const FinSupportVector& o) {
  add_scaled(Scalar(-1), o);
  return *this;
}

void FinSupportVector::add_scaled(const Scalar& c, const FinSupportVector& x) {
  if (x.shape_ != shape_) throw ShapeMismatch("vector shapes differ");
  if (c.is_zero()) return;
  grow(x.levels_);
  for (std::size_t k = 0; k < x.strands_.size(); ++k) {
    if (!x.strands_[k].is_zero()) strands_[k].fma(c, x.strands_[k]);
  }
  for (std::size_t k = 0; k < tail_.size(); ++k) {
    if (!x.tail_[k].is_zero()) tail_[k].fma(c, x.tail_[k]);
  }
  trim();
}

FinSupportVector FinSupportVector::scaled(const Scalar& c) const {
  FinSupportVector v(shape_);
  v.add_scaled(c, *this);
  return v;
}

bool operator==(const FinSupportVector& a, const FinSupportVector& b) {
  if (a.shape_ != b.shape_) return false;
  FinSupportVector x = a, y = b;
  x.trim();
  y.trim();
  return x.levels_ == y.levels_ && x.strands_ == y.strands_ && x.tail_ == y.tail_;
}

std::string FinSupportVector::str() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (std::size_t l = 0; l < levels_; ++l) {
    for (std::size_t s = 0; s < shape_.p; ++s) {
      const Scalar& v = strands_[l * shape_.p + s];
      if (v.is_zero()) continue;
      os << (first ? "" : ", ") << "(" << s << "," << l << "): " << v.str();
      first = false;
    }
  }
  for (std::size_t t = 0; t < shape_.q; ++t) {
    if (tail_[t].is_zero()) continue;
    os << (first ? "" : ", ") << "t" << t << ": " << tail_[t].str();
    first = false;
  }
  os << "}";
  return os.str();
}

Scalar inner(const FinSupportVector& x, const FinSupportVector& y) {
  if (x.shape() != y.shape()) throw ShapeMismatch("inner: vector shapes differ");
  const std::size_t n = std::min(x.levels(), y.levels()) * x.shape().p;
  Scalar acc;
  const auto& xs = x.strand_entries();
  const auto& ys = y.strand_entries();
  for (std::size_t k = 0; k < n; ++k) {
    if (!xs[k].is_zero() && !ys[k].is_zero()) acc.fma(xs[k], ys[k].conj());
  }
  acc += exactnum::inner(x.tail(), y.tail());
  return acc;
}

}  // namespace shiftlab::opcore
