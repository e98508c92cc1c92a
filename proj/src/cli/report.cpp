#include "shiftlab/cli/report.hpp"

namespace shiftlab::cli {

Json to_json(const opcore::Scalar& s) { return s.str(); }

Json to_json(const opcore::FinMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const opcore::FinSupportVector& v) {
  Json j = Json::object();
  const auto& sh = v.shape();
  for (std::size_t l = 0; l < v.levels(); ++l) {
    for (std::size_t s = 0; s < sh.p; ++s) {
      const auto c = opcore::Coord::strand(s, l);
      if (const auto x = v.at(c); !x.is_zero()) j[c.str()] = x.str();
    }
  }
  for (std::size_t t = 0; t < sh.q; ++t) {
    const auto c = opcore::Coord::tail_at(t);
    if (const auto x = v.at(c); !x.is_zero()) j[c.str()] = x.str();
  }
  return j;
}

Json to_json(const opcore::StructuredOperator& t) {
  Json j;
  j["shape_in"] = t.shape_in.str();
  j["shape_out"] = t.shape_out.str();
  Json sym = Json::object();
  for (const auto& [k, m] : t.symbol.coeffs) sym[std::to_string(k)] = to_json(m);
  j["symbol"] = std::move(sym);
  Json entries = Json::array();
  const auto& kb = t.kernel.block;
  for (std::size_t r = 0; r < kb.rows(); ++r) {
    for (std::size_t c = 0; c < kb.cols(); ++c) {
      if (!kb(r, c).is_zero()) entries.push_back(Json::array({r, c, kb(r, c).str()}));
    }
  }
  j["kernel"] = {{"levels_out", t.kernel.n_out}, {"levels_in", t.kernel.n_in}, {"entries", std::move(entries)}};
  if (t.tag) {
    j["tag"] = {{"origin", t.tag->origin}, {"pure", t.tag->pure}, {"analytic", t.tag->analytic}, {"model", t.tag->model}};
  }
  return j;
}

Json to_json(const opcore::TolerancePolicy& tol) {
  return {{"rank_tol", tol.rank_tol}, {"psd_tol", tol.psd_tol}, {"circle_samples", tol.circle_samples}};
}

Json to_json(const analysis::Certainty& c) {
  Json j;
  j["verdict"] = analysis::to_string(c.verdict);
  j["evidence"] = c.evidence;
  if (c.witness) j["witness"] = to_json(*c.witness);
  if (!c.samples.empty()) j["samples"] = c.samples;
  if (c.dimension) j["dimension"] = c.dimension;
  return j;
}

Json to_json(const analysis::HypothesisCheck& c) {
  return {{"name", c.name}, {"verdict", analysis::to_string(c.verdict)}, {"detail", c.detail}};
}

namespace {

Json checks_json(const std::vector<analysis::HypothesisCheck>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back(to_json(c));
  return a;
}

Json defect_json(const analysis::DefectData& d) {
  Json j;
  j["finite_rank"] = d.finite_rank;
  j["structured"] = d.structured;
  if (d.finite_rank) {
    j["dimension"] = d.basis.size();
    Json b = Json::array();
    for (const auto& v : d.basis) b.push_back(to_json(v));
    j["basis"] = std::move(b);
  }
  if (d.structured) {
    j["window"] = d.window;
    j["window_rank"] = d.window_rank;
    j["symbol"] = to_json(d.symbol);
  }
  return j;
}

}  // namespace

Json to_json(const analysis::Certificate& c) {
  Json j;
  j["kind"] = analysis::to_string(c.kind);
  j["conclusion"] = c.conclusion;
  j["checked"] = checks_json(c.checked);
  j["notes"] = c.notes;
  if (!c.model.empty()) j["model"] = c.model;
  return j;
}

Json to_json(const analysis::CertificateOutcome& o) {
  Json j;
  j["issued"] = o.issued();
  if (o.certificate) j["certificate"] = to_json(*o.certificate);
  j["checks"] = checks_json(o.checks);
  return j;
}

Json to_json(const analysis::Classification& c) {
  Json j;
  j["contraction"] = to_json(c.contraction);
  j["hyponormal"] = to_json(c.hyponormal);
  Json sc;
  sc["finite_rank"] = c.selfcomm.finite_rank;
  sc["rank"] = c.selfcomm.rank;
  sc["positive"] = c.selfcomm.positive;
  sc["float_derived"] = c.selfcomm.float_derived;
  Json pairs = Json::array();
  for (const auto& p : c.selfcomm.pairs) pairs.push_back({{"alpha", p.alpha.str()}, {"e", to_json(p.e)}});
  sc["pairs"] = std::move(pairs);
  Json alphas = Json::array();
  for (const auto& a : c.selfcomm.alphas()) alphas.push_back(a.str());
  sc["alphas"] = std::move(alphas);
  sc["operator"] = to_json(c.selfcomm.op);
  j["self_commutator"] = std::move(sc);
  j["defect"] = defect_json(c.defect);
  j["defect_adjoint"] = defect_json(c.defect_adjoint);
  if (c.n_finite) {
    Json a = Json::array();
    for (const auto& x : c.n_finite->alphas) a.push_back(x.str());
    j["n_finite"] = {{"n", c.n_finite->n}, {"alphas", std::move(a)}};
  } else {
    j["n_finite"] = nullptr;
  }
  j["finite_isometry"] = c.finite_isometry;
  j["purity"] = to_json(c.purity);
  Json certs = Json::array();
  for (const auto& cert : c.certificates) certs.push_back(to_json(cert));
  j["certificates"] = std::move(certs);
  j["defect_gap"] = c.defect_gap ? Json(*c.defect_gap) : Json(nullptr);
  j["notes"] = c.notes;
  return j;
}

Json to_json(const analysis::TriangularDecomposition& d) {
  Json j;
  j["s"] = to_json(d.s);
  j["a"] = to_json(d.a);
  j["b"] = to_json(d.b);
  j["basis_change"] = to_json(d.basis_change);
  j["kernel_strands"] = d.kernel_strands;
  j["defect_strands"] = d.defect_strands;
  j["kernel_tail"] = d.kernel_tail;
  j["defect_tail"] = d.defect_tail;
  Json w = Json::array();
  for (const auto& v : d.wandering_basis) w.push_back(to_json(v));
  j["wandering_basis"] = std::move(w);
  j["unitary_part_absent"] = to_json(d.unitary_part_absent);
  j["checks"] = checks_json(d.checks);
  return j;
}

Json to_json(const equivalence::ResidualReport& r) {
  Json j;
  j["depth"] = r.depth;
  j["labels_checked"] = r.labels_checked;
  j["max_residual"] = r.max_residual;
  j["zero"] = r.zero;
  Json v = Json::array();
  for (const auto& c : r.violations) v.push_back(c.str());
  j["violations"] = std::move(v);
  return j;
}

Json to_json(const equivalence::ShimorinModelData& d) {
  Json j;
  j["left_inverse_choice"] = d.left_inverse_choice;
  j["left_inverse"] = to_json(d.left_inverse);
  j["depth"] = d.depth;
  Json kb = Json::array();
  for (std::size_t a = 0; a < d.kernel_basis.size(); ++a) {
    kb.push_back({{"vector", to_json(d.kernel_basis[a])}, {"norm_squared", d.kernel_gram[a].str()}});
  }
  j["kernel_basis"] = std::move(kb);
  Json gens = Json::array();
  for (std::size_t g = 0; g < d.generators.size(); ++g) {
    Json coeffs = Json::array();
    for (const auto& c : d.coefficients[g]) {
      Json row = Json::array();
      for (const auto& x : c) row.push_back(x.str());
      coeffs.push_back(std::move(row));
    }
    gens.push_back({{"generator", to_json(d.generators[g])}, {"coefficients", std::move(coeffs)}});
  }
  j["generators"] = std::move(gens);
  Json pts = Json::array();
  for (const auto& z : d.sample_points) pts.push_back(z.str());
  j["sample_points"] = std::move(pts);
  j["gram"] = to_json(d.gram);
  j["gram_psd"] = d.gram_psd;
  j["gram_min_eigenvalue"] = d.gram_min_eigenvalue;
  return j;
}

std::string render(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace shiftlab::cli
