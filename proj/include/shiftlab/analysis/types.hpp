#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftlab/opcore/algebra.hpp"

namespace shiftlab::analysis {

using opcore::Coord;
using opcore::FinMatrix;
using opcore::FinSupportVector;
using opcore::FinVector;
using opcore::LaurentSymbol;
using opcore::Mode;
using opcore::Scalar;
using opcore::SpaceShape;
using opcore::StructuredOperator;
using opcore::TolerancePolicy;

class PreconditionFailed : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InternalInconsistency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Verdict { Certified, Refuted, Unknown };
std::string to_string(Verdict v);

struct Certainty {
  Verdict verdict = Verdict::Unknown;
  /// Exact witness; always present for Refuted.
  std::optional<FinSupportVector> witness;
  std::string evidence;
  /// Sampled data backing an Unknown verdict (e.g. minimal eigenvalues on the circle).
  std::vector<double> samples;
  /// Dimension of the surviving subspace for purity refinement.
  std::size_t dimension = 0;

  static Certainty certified(std::string evidence);
  static Certainty refuted(FinSupportVector witness, std::string evidence);
  static Certainty unknown(std::string evidence, std::vector<double> samples = {});

  bool is_certified() const { return verdict == Verdict::Certified; }
  bool is_refuted() const { return verdict == Verdict::Refuted; }
  bool is_unknown() const { return verdict == Verdict::Unknown; }
};

struct CommutatorPair {
  Scalar alpha;
  FinSupportVector e;
};

struct SelfCommutator {
  /// Canonical T*T - TT*.
  StructuredOperator op;
  /// Symbol residual vanishes.
  bool finite_rank = false;
  std::size_t rank = 0;
  /// Window block is positive semidefinite; pairs are filled only then.
  bool positive = false;
  /// α ascending, e orthonormal; Σ α e⊗e reassembles op.
  std::vector<CommutatorPair> pairs;
  LaurentSymbol residual;
  bool float_derived = false;

  std::vector<Scalar> alphas() const;
};

struct DefectData {
  /// I - T*T (or I - TT*).
  StructuredOperator defect_sq;
  bool finite_rank = false;
  /// Orthogonal basis of the range when finite_rank.
  std::vector<FinSupportVector> basis;
  /// Squared norms of basis.
  FinVector gram;
  /// Constant symbol: the operator is window_block on the window and symbol ⊗ I beyond it.
  bool structured = false;
  std::size_t window = 0;
  FinMatrix window_block;
  FinMatrix symbol;
  std::size_t window_rank = 0;
};

struct NFinite {
  std::size_t n = 0;
  std::vector<Scalar> alphas;
};

enum class CertificateKind { TriangularAnalyticShift, PureFiniteIsometry, ShiftCoshiftIsometry, ProjectionCommutator, ModelEquivalence };
std::string to_string(CertificateKind k);

struct HypothesisCheck {
  std::string name;
  Verdict verdict = Verdict::Unknown;
  std::string detail;
};

struct Certificate {
  CertificateKind kind = CertificateKind::PureFiniteIsometry;
  std::vector<HypothesisCheck> checked;
  std::string conclusion;
  std::vector<std::string> notes;
  /// Model key ("x1:2", "x2:1,1,3/4") when the certificate names a model.
  std::string model;
};

/// A certificate when every hypothesis is Certified; otherwise the checks explain why not.
struct CertificateOutcome {
  std::optional<Certificate> certificate;
  std::vector<HypothesisCheck> checks;

  bool issued() const { return certificate.has_value(); }
  std::vector<HypothesisCheck> failed() const;
};

struct Classification {
  Certainty contraction;
  Certainty hyponormal;
  SelfCommutator selfcomm;
  DefectData defect;
  DefectData defect_adjoint;
  std::optional<NFinite> n_finite;
  bool finite_isometry = false;
  Certainty purity;
  std::vector<Certificate> certificates;
  /// dim(ran D_{T*} ⊖ ran D_T) computed from the defect windows, when both symbols agree.
  std::optional<std::size_t> defect_gap;
  std::vector<std::string> notes;
};

struct ClassifyOptions {
  TolerancePolicy tol;
  std::size_t purity_depth = 8;
  std::size_t purity_window = 32;
  bool run_purity = true;
};

}  // namespace shiftlab::analysis
