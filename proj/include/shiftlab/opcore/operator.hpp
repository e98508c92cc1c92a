#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <optional>
#include <string>

#include "shiftlab/opcore/vector.hpp"

namespace shiftlab::opcore {

/// Matrix Laurent polynomial Σ C_k z^k; induces (T x)_i = Σ_j C_{i-j} x_j on the strands.
struct LaurentSymbol {
  std::size_t p_out = 0;
  std::size_t p_in = 0;
  std::map<int, FinMatrix> coeffs;

  /// Largest positive degree (0 if none).
  std::size_t deg_plus() const;
  /// Largest negative degree in absolute value (0 if none).
  std::size_t deg_minus() const;
  std::size_t band() const { return std::max(deg_plus(), deg_minus()); }
  bool is_zero() const { return coeffs.empty(); }
  /// Only a z⁰ term (or nothing).
  bool is_constant() const { return coeffs.empty() || (coeffs.size() == 1 && coeffs.begin()->first == 0); }
  FinMatrix coeff(int k) const;
  void prune();
  /// Value at a point of the circle, in floating point.
  FinMatrix evaluate(std::complex<double> z) const;
};

/// Finite-rank part supported on levels < n_out (rows) and < n_in (columns), tails included.
struct WindowedKernel {
  std::size_t n_out = 0;
  std::size_t n_in = 0;
  FinMatrix block;
};

/// Metadata attached by constructors whose structure is known a priori.
struct ConstructionTag {
  std::string origin;
  bool pure = false;
  bool analytic = false;
  /// Model key such as "x2:1,1,3/4" when built from a model spec.
  std::string model;
  std::string note;
};

/// T = T_symbol + kernel, acting from shape_in to shape_out.
class StructuredOperator {
 public:
  StructuredOperator() = default;
  StructuredOperator(SpaceShape out, SpaceShape in);

  SpaceShape shape_out;
  SpaceShape shape_in;
  LaurentSymbol symbol;
  WindowedKernel kernel;
  std::optional<ConstructionTag> tag;

  bool is_square() const { return shape_in == shape_out; }
  std::size_t band() const { return symbol.band(); }
  std::size_t window() const { return std::max(kernel.n_out, kernel.n_in); }
  Mode mode() const;

  /// Drops zero symbol coefficients and trims all-zero boundary level slabs.
  void canonicalize();
  /// Exact matrix entry.
  Scalar entry(const Coord& row, const Coord& col) const;
  std::string str() const;
};

}  // namespace shiftlab::opcore
