#include "shiftlab/opcore/operator.hpp"

#include <sstream>

namespace shiftlab::opcore {

std::size_t LaurentSymbol::deg_plus() const {
  if (coeffs.empty()) return 0;
  return static_cast<std::size_t>(std::max(0, coeffs.rbegin()->first));
}

std::size_t LaurentSymbol::deg_minus() const {
  if (coeffs.empty()) return 0;
  return static_cast<std::size_t>(std::max(0, -coeffs.begin()->first));
}

FinMatrix LaurentSymbol::coeff(int k) const {
  auto it = coeffs.find(k);
  if (it == coeffs.end()) return FinMatrix(p_out, p_in);
  return it->second;
}

void LaurentSymbol::prune() {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    it = it->second.is_zero() ? coeffs.erase(it) : std::next(it);
  }
}

FinMatrix LaurentSymbol::evaluate(std::complex<double> z) const {
  FinMatrix out(p_out, p_in, Mode::Float);
  for (const auto& [k, c] : coeffs) {
    const Scalar zk = Scalar::from_complex(std::pow(z, k));
    out += c.scaled(zk);
  }
  return out;
}

StructuredOperator::StructuredOperator(SpaceShape out, SpaceShape in) : shape_out(out), shape_in(in) {
  symbol.p_out = out.p;
  symbol.p_in = in.p;
  kernel.block = FinMatrix(out.q, in.q);
}

Mode StructuredOperator::mode() const {
  if (kernel.block.mode() == Mode::Float) return Mode::Float;
  for (const auto& [k, c] : symbol.coeffs) {
    if (c.mode() == Mode::Float) return Mode::Float;
  }
  return Mode::Exact;
}

namespace {

bool row_slab_zero(const FinMatrix& b, std::size_t first, std::size_t count) {
  for (std::size_t i = first; i < first + count; ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      if (!b(i, j).is_zero()) return false;
    }
  }
  return true;
}

bool col_slab_zero(const FinMatrix& b, std::size_t first, std::size_t count) {
  for (std::size_t j = first; j < first + count; ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) {
      if (!b(i, j).is_zero()) return false;
    }
  }
  return true;
}

}  // namespace

void StructuredOperator::canonicalize() {
  symbol.p_out = shape_out.p;
  symbol.p_in = shape_in.p;
  symbol.prune();
  auto& k = kernel;
  const std::size_t po = shape_out.p, pi = shape_in.p;
  std::size_t n_out = po == 0 ? 0 : k.n_out;
  std::size_t n_in = pi == 0 ? 0 : k.n_in;
  while (n_out > 0 && row_slab_zero(k.block, (n_out - 1) * po, po)) --n_out;
  while (n_in > 0 && col_slab_zero(k.block, (n_in - 1) * pi, pi)) --n_in;
  if (n_out == k.n_out && n_in == k.n_in) return;
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < n_out * po; ++i) rows.push_back(i);
  for (std::size_t t = 0; t < shape_out.q; ++t) rows.push_back(k.n_out * po + t);
  for (std::size_t j = 0; j < n_in * pi; ++j) cols.push_back(j);
  for (std::size_t t = 0; t < shape_in.q; ++t) cols.push_back(k.n_in * pi + t);
  k.block = k.block.select(rows, cols);
  k.n_out = n_out;
  k.n_in = n_in;
}

Scalar StructuredOperator::entry(const Coord& row, const Coord& col) const {
  Scalar v;
  if (!row.tail && !col.tail) {
    const int d = static_cast<int>(row.level) - static_cast<int>(col.level);
    auto it = symbol.coeffs.find(d);
    if (it != symbol.coeffs.end()) v += it->second(row.index, col.index);
  }
  const bool in_rows = row.tail || row.level < kernel.n_out;
  const bool in_cols = col.tail || col.level < kernel.n_in;
  if (in_rows && in_cols) v += kernel.block(row.offset(shape_out, kernel.n_out), col.offset(shape_in, kernel.n_in));
  return v;
}

std::string StructuredOperator::str() const {
  std::ostringstream os;
  os << shape_in.str() << " -> " << shape_out.str() << "; symbol {";
  bool first = true;
  for (const auto& [k, c] : symbol.coeffs) {
    os << (first ? "" : ", ") << k << ": " << c.str();
    first = false;
  }
  os << "}; window " << kernel.n_out << "x" << kernel.n_in << " " << kernel.block.str();
  return os.str();
}

}  // namespace shiftlab::opcore
