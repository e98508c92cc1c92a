#include "shiftlab/analysis/types.hpp"

namespace shiftlab::analysis {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified:
      return "certified";
    case Verdict::Refuted:
      return "refuted";
    case Verdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::TriangularAnalyticShift:
      return "triangular_analytic_shift";
    case CertificateKind::PureFiniteIsometry:
      return "pure_finite_isometry";
    case CertificateKind::ShiftCoshiftIsometry:
      return "shift_coshift_isometry";
    case CertificateKind::ProjectionCommutator:
      return "projection_commutator";
    case CertificateKind::ModelEquivalence:
      return "model_equivalence";
  }
  return "";
}

Certainty Certainty::certified(std::string evidence) {
  Certainty c;
  c.verdict = Verdict::Certified;
  c.evidence = std::move(evidence);
  return c;
}

Certainty Certainty::refuted(FinSupportVector witness, std::string evidence) {
  Certainty c;
  c.verdict = Verdict::Refuted;
  c.witness = std::move(witness);
  c.evidence = std::move(evidence);
  return c;
}

Certainty Certainty::unknown(std::string evidence, std::vector<double> samples) {
  Certainty c;
  c.verdict = Verdict::Unknown;
  c.evidence = std::move(evidence);
  c.samples = std::move(samples);
  return c;
}

std::vector<Scalar> SelfCommutator::alphas() const {
  std::vector<Scalar> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.alpha);
  return out;
}

std::vector<HypothesisCheck> CertificateOutcome::failed() const {
  std::vector<HypothesisCheck> out;
  for (const auto& c : checks) {
    if (c.verdict != Verdict::Certified) out.push_back(c);
  }
  return out;
}

}  // namespace shiftlab::analysis
