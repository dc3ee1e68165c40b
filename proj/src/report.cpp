#include "mathieu/report.hpp"

#include <cmath>
#include <sstream>

namespace mh {

namespace {

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json interval(const TInterval& i) { return Json{{"lo", i.lo}, {"hi", i.hi}}; }

}  // namespace

Json to_json(cplx z) { return format_complex(z); }

Json to_json(const DiophantineProbe& p) {
  Json j;
  j["verdict"] = to_string(p.verdict);
  if (p.witness)
    j["witness"] = Json{{"q", p.witness->first}, {"p", p.witness->second}};
  else
    j["witness"] = nullptr;
  j["min_distance"] = num(p.min_distance);
  Json rates = Json::array();
  for (const auto& [q, r] : p.rate_profile) rates.push_back(Json{{"q", q}, {"q_times_distance", num(r)}});
  j["rate_profile"] = rates;
  return j;
}

Json to_json(const DiophantineVerdict& v) {
  Json j;
  j["alpha"] = num(v.alpha);
  j["rational_input"] = v.rational_input ? Json(v.rational_input->str()) : Json(nullptr);
  j["condition8"] = to_json(v.condition8);
  j["condition100"] = to_json(v.condition100);
  j["condition104"] = to_json(v.condition104);
  return j;
}

Json to_json(const CriticalPoint& cp) {
  Json j;
  j["lambda_star"] = to_json(cp.lambda_star);
  j["t_star"] = to_json(cp.t_star);
  j["F"] = to_json(cp.F);
  j["d2F"] = to_json(cp.d2F);
  j["tau_sq"] = to_json(cp.tau_sq);
  j["t_real"] = cp.t_real;
  j["is_two_periodic"] = cp.is_two_periodic;
  j["family"] = to_string(cp.family);
  j["n_guess"] = cp.n_guess;
  j["refined"] = cp.refined;
  return j;
}

Json to_json(const InverseDnIntegral& v) {
  Json j;
  j["value"] = num(v.value);
  j["error_estimate"] = num(v.error_estimate);
  j["divergence_flag"] = v.divergence_flag;
  j["growth_per_decade"] = num(v.growth_per_decade);
  j["excluded"] = v.excluded;
  Json tr = Json::array();
  for (const auto& [e, x] : v.trace) tr.push_back(Json{{"epsilon", e}, {"value", num(x)}});
  j["trace"] = tr;
  return j;
}

Json to_json(const EssEvidence& e) {
  Json j;
  j["point"] = to_json(e.point);
  j["label"] = e.label;
  j["algebraic_multiplicity"] = e.algebraic_multiplicity;
  j["geometric_multiplicity"] = e.geometric_multiplicity;
  j["divergence"] = to_json(e.divergence);
  j["confirmed"] = e.confirmed;
  return j;
}

Json to_json(const ProjectionProfile& p) {
  Json j;
  j["n"] = p.n;
  j["sup_inverse"] = num(p.sup_inverse);
  j["both_fraction"] = num(p.both_fraction);
  j["max_disagreement"] = num(p.max_disagreement);
  j["excluded"] = p.excluded;
  Json s = Json::array();
  for (const auto& x : p.samples) {
    Json e{{"t", x.t}, {"abs_d", num(x.abs_d)}, {"method", to_string(x.method)}};
    e["wronskian"] = x.cross ? num(*x.cross) : Json(nullptr);
    e["wronskian_rel_error"] = num(x.cross_rel_error);
    e["mutually_valid"] = x.mutually_valid;
    s.push_back(e);
  }
  j["samples"] = s;
  return j;
}

Json to_json(const RegionDecomposition& r) {
  Json j;
  j["n"] = r.n;
  j["epsilon_n"] = num(r.epsilon_n);
  j["beta_abs"] = num(r.beta_abs);
  j["I1"] = interval(r.I1);
  j["I2"] = interval(r.I2);
  j["I3"] = interval(r.I3);
  j["I4"] = interval(r.I4);
  j["I5"] = interval(r.I5);
  j["notices"] = r.notices;
  return j;
}

Json to_json(const SpectralityReport& r) {
  Json j;
  j["modulus_equal"] = r.modulus_equal;
  j["diophantine"] = r.diophantine ? to_json(*r.diophantine) : Json(nullptr);
  j["asymptotically_spectral"] = to_string(r.asymptotically_spectral);
  Json s = Json::array();
  for (const auto& cp : r.singularities) s.push_back(to_json(cp));
  j["singularities"] = s;
  Json e = Json::array();
  for (const auto& x : r.ess) e.push_back(to_json(x));
  j["ess"] = e;
  Json b = Json::array();
  for (const auto& x : r.ess_borderline) b.push_back(to_json(x));
  j["ess_borderline"] = b;
  j["ess_at_infinity"] = to_string(r.ess_at_infinity);
  Json inf = Json::array();
  for (const auto& [n, v] : r.infinity_evidence) {
    Json row = to_json(v);
    row["n"] = n;
    inf.push_back(row);
  }
  j["ess_at_infinity_evidence"] = inf;
  j["expansion_form"] = to_string(r.expansion_form);
  j["notes"] = r.notes;
  return j;
}

Json to_json(const ResidualReport& r) {
  Json j;
  j["form"] = to_string(r.form);
  j["n_max"] = r.n_max;
  if (r.h) j["h"] = *r.h;
  if (r.form == ExpansionForm::AsymptoticallyElegant) j["S_set"] = r.S_set;
  j["max_residual"] = num(r.max_residual);
  j["mean_residual"] = num(r.mean_residual);
  j["quadrature_delta"] = num(r.quadrature_delta);
  j["t_nodes"] = r.t_nodes;
  Json pts = Json::array();
  for (const auto& p : r.per_point)
    pts.push_back(Json{{"x", p.x}, {"f", to_json(p.f)}, {"reconstruction", to_json(p.reconstruction)},
                       {"residual", num(p.residual)}});
  j["per_point"] = pts;
  if (!r.single_term_trace.empty()) {
    Json tr = Json::array();
    for (const auto& [d, v] : r.single_term_trace) tr.push_back(Json{{"delta", d}, {"value", num(v)}});
    j["single_term_trace"] = tr;
  }
  j["notes"] = r.notes;
  return j;
}

Json to_json(const PredictedDegeneracy& p) {
  Json j;
  j["n"] = p.n;
  j["family"] = to_string(p.family);
  j["product"] = to_json(p.product.value());
  j["product_log_magnitude"] = num(p.product.log_magnitude);
  j["product_phase"] = num(p.product_phase);
  j["real_predicted"] = p.real_predicted;
  j["t_pred"] = p.t_pred.is_zero() ? Json(0.0) : num(p.t_pred.magnitude());
  j["t_pred_log"] = num(p.t_pred.log_magnitude);
  Json s = Json::array();
  for (const auto& x : p.sensitivity)
    s.push_back(Json{{"c", x.c}, {"real_predicted", x.real_predicted}, {"t_pred", num(x.t_pred)}});
  j["sensitivity"] = s;
  j["note"] = p.note;
  return j;
}

Json artifact(const std::string& kind, const MathieuPotential& pot, Json payload) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  j["potential"] = Json{{"a", to_json(pot.a)}, {"b", to_json(pot.b)}};
  for (auto it = payload.begin(); it != payload.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string spectrum_csv(const BlochCurveSet& curves) {
  std::ostringstream os;
  os.precision(17);
  os << "t,n,re,im,residual\n";
  for (std::size_t i = 0; i < curves.t_grid.size(); ++i)
    for (const auto& [n, vals] : curves.curves)
      os << curves.t_grid[i] << "," << n << "," << vals[i].real() << "," << vals[i].imag() << ","
         << curves.residuals.at(n)[i] << "\n";
  return os.str();
}

std::string profile_csv(const ProjectionProfile& p) {
  std::ostringstream os;
  os.precision(17);
  os << "t,abs_d,method,wronskian,wronskian_rel_error\n";
  for (const auto& s : p.samples) {
    os << s.t << "," << s.abs_d << "," << to_string(s.method) << ",";
    if (s.cross) os << *s.cross;
    os << ",";
    if (s.cross) os << s.cross_rel_error;
    os << "\n";
  }
  return os.str();
}

}  // namespace mh
