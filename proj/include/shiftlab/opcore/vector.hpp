#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "shiftlab/exactnum/matrix.hpp"

namespace shiftlab::opcore {

using exactnum::FinMatrix;
using exactnum::FinVector;
using exactnum::Mode;
using exactnum::Scalar;
using exactnum::TolerancePolicy;

class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// ℓ²(Z₊)⊗Cᵖ ⊕ Cᵠ.
struct SpaceShape {
  std::size_t p = 0;
  std::size_t q = 0;

  /// Coordinates covered by a window of `levels` shift levels plus the tail.
  std::size_t dim(std::size_t levels) const { return levels * p + q; }
  std::string str() const;
  friend auto operator<=>(const SpaceShape&, const SpaceShape&) = default;
};

/// A basis label: strand s at level l, or tail index t.
struct Coord {
  bool tail = false;
  std::size_t index = 0;
  std::size_t level = 0;

  static Coord strand(std::size_t s, std::size_t l) { return {false, s, l}; }
  static Coord tail_at(std::size_t t) { return {true, t, 0}; }
  /// Position inside a window of `levels` levels.
  std::size_t offset(const SpaceShape& sh, std::size_t levels) const { return tail ? levels * sh.p + index : level * sh.p + index; }
  std::string str() const;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

/// Finitely supported vector: levels [0, levels) of the strands, plus the tail.
class FinSupportVector {
 public:
  FinSupportVector() = default;
  explicit FinSupportVector(SpaceShape shape) : shape_(shape), tail_(shape.q) {}

  static FinSupportVector basis(SpaceShape shape, const Coord& c);
  /// Reads a window-ordered dense vector of length shape.dim(levels).
  static FinSupportVector from_window(SpaceShape shape, std::size_t levels, const FinVector& w);

  const SpaceShape& shape() const { return shape_; }
  std::size_t levels() const { return levels_; }
  const FinVector& strand_entries() const { return strands_; }
  const FinVector& tail() const { return tail_; }

  Scalar at(const Coord& c) const;
  Scalar& ref(const Coord& c);

  /// Dense window-ordered copy; entries at levels >= `levels` are dropped.
  FinVector window(std::size_t levels) const;
  void grow(std::size_t levels);
  void trim();
  bool is_zero() const;

  FinSupportVector& operator+=(const FinSupportVector& o);
  FinSupportVector& operator-=(const FinSupportVector& o);
  friend FinSupportVector operator+(FinSupportVector a, const FinSupportVector& b) { return a += b; }
  friend FinSupportVector operator-(FinSupportVector a, const FinSupportVector& b) { return a -= b; }
  FinSupportVector scaled(const Scalar& c) const;
  /// this += c·x.
  void add_scaled(const Scalar& c, const FinSupportVector& x);

  friend bool operator==(const FinSupportVector& a, const FinSupportVector& b);
  std::string str() const;

 private:
  SpaceShape shape_;
  std::size_t levels_ = 0;
  FinVector strands_;
  FinVector tail_;
};

/// <x, y>, linear in x.
Scalar inner(const FinSupportVector& x, const FinSupportVector& y);

}  // namespace shiftlab::opcore
