#include "mathieu/spectrality.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mh {

std::string to_string(DnMethod m) { return m == DnMethod::Eigenvector ? "eigenvector" : "wronskian"; }

std::string to_string(ExpansionForm f) {
  switch (f) {
    case ExpansionForm::Elegant:
      return "Elegant";
    case ExpansionForm::AsymptoticallyElegant:
      return "AsymptoticallyElegant";
    case ExpansionForm::Gasymov:
      return "Gasymov";
  }
  return "?";
}

namespace {

Family family_at(double t) { return std::abs(t) > kPi / 2 ? Family::Antiperiodic : Family::Periodic; }

bool real_nonnegative(cplx s) {
  double m = std::abs(s);
  return m == 0.0 || (s.real() >= 0.0 && std::abs(s.imag()) <= 1e-8 * m);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double abs_dn(const MathieuPotential& pot, int n, double t) {
  return std::abs(bloch_function(pot, t, n, family_at(t)).d);
}

ProjectionProfile dn_profile(const MathieuPotential& pot, int n, const std::vector<double>& t_grid,
                             int wronskian_stride) {
  ProjectionProfile out;
  out.n = n;
  int both = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    double t = t_grid[i];
    BlochPair bp;
    try {
      bp = bloch_function(pot, t, n, family_at(t));
    } catch (const NonconvergenceError&) {
      out.excluded.push_back(t);
      continue;
    }
    DnSample s;
    s.t = t;
    s.abs_d = std::abs(bp.d);
    s.method = DnMethod::Eigenvector;
    if (wronskian_stride > 0 && i % wronskian_stride == 0) {
      try {
        auto w = dn_via_wronskian_detail(pot, t, bp.psi.lambda);
        s.cross = w.abs_d;
        s.cross_rel_error = w.rel_error;
        s.mutually_valid = w.rel_error <= kWronskianValidity;
        ++both;
      } catch (const std::runtime_error&) {
      }
    }
    if (s.mutually_valid)
      out.max_disagreement = std::max(out.max_disagreement, std::abs(*s.cross - s.abs_d) / s.abs_d);
    out.sup_inverse = std::max(out.sup_inverse, 1.0 / s.abs_d);
    out.samples.push_back(s);
  }
  out.both_fraction = t_grid.empty() ? 0.0 : double(both) / double(t_grid.size());
  return out;
}

std::vector<double> degeneracy_points(const MathieuPotential& pot, int n) {
  std::vector<double> pts;
  if (n != 0) {
    auto s = degeneracy_tau_sq(pot, std::abs(n), false);
    if (s && real_nonnegative(*s)) {
      double r = std::sqrt(std::abs(*s));
      if (r < kPi / 2) {
        pts.push_back(r);
        if (r > 0.0) pts.push_back(-r);
      }
    }
  }
  int N = n >= 0 ? n : -n - 1;
  auto s = degeneracy_tau_sq(pot, N, true);
  if (s && real_nonnegative(*s)) {
    double r = std::sqrt(std::abs(*s));
    if (r < kPi / 2) {
      pts.push_back(kPi - r);
      pts.push_back(-(kPi - r));
    }
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

InverseDnIntegral integral_inverse_dn(const MathieuPotential& pot, int n, double lo, double hi,
                                      double epsilon_floor) {
  if (!(lo >= -kPi - 1e-12 && hi <= kPi + 1e-12 && lo < hi))
    throw ValidationError("integral_inverse_dn: interval must lie in (-pi, pi] with lo < hi");
  if (!(epsilon_floor > 0.0)) throw ValidationError("integral_inverse_dn: epsilon_floor must be positive");
  InverseDnIntegral out;
  for (double p : degeneracy_points(pot, n))
    if (p >= lo - 1e-12 && p <= hi + 1e-12) out.excluded.push_back(p);

  auto f = [&](double t) { return 1.0 / abs_dn(pot, n, t); };
  double err_total = 0.0;
  auto integrate_with = [&](double eps) {
    // pieces of [lo, hi] outside the eps-neighbourhoods, split by decades toward each excluded point
    std::vector<double> cuts{lo, hi};
    for (double p : out.excluded) {
      cuts.push_back(p - eps);
      cuts.push_back(p + eps);
      for (double w = 10.0 * eps; w < hi - lo; w *= 10.0) {
        cuts.push_back(p - w);
        cuts.push_back(p + w);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    err_total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double x0 = std::max(cuts[i], lo), x1 = std::min(cuts[i + 1], hi);
      if (!(x1 > x0)) continue;
      double mid = 0.5 * (x0 + x1);
      bool inside = false;
      for (double p : out.excluded)
        if (std::abs(mid - p) < eps) inside = true;
      if (inside) continue;
      double err = 0.0;
      try {
        sum += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, x0, x1, 6, 1e-9, &err);
      } catch (const NonconvergenceError& e) {
        throw NonconvergenceError(std::string("integral_inverse_dn: ") + e.what() + " on [" + fmt(x0) + ", " +
                                  fmt(x1) + "] at eps=" + fmt(eps));
      }
      err_total += err;
    }
    return sum;
  };

  out.value = integrate_with(epsilon_floor);
  out.error_estimate = err_total;
  if (out.excluded.empty()) {
    out.trace.push_back({epsilon_floor, out.value});
    return out;
  }
  for (int k = 2; k <= 6; ++k) {
    double eps = std::pow(10.0, -k);
    out.trace.push_back({eps, integrate_with(eps)});
  }
  bool increasing = true;
  double max_inc = 0.0;
  for (std::size_t k = 1; k < out.trace.size(); ++k) {
    double inc = out.trace[k].second - out.trace[k - 1].second;
    if (!(inc > 0.0)) increasing = false;
    max_inc = std::max(max_inc, inc);
  }
  double first = out.trace.front().second, last = out.trace.back().second;
  double last_inc = last - out.trace[out.trace.size() - 2].second;
  out.growth_per_decade = first > 0.0 ? std::pow(last / first, 1.0 / double(out.trace.size() - 1)) : INFINITY;
  out.divergence_flag = increasing && out.growth_per_decade >= 1.25 && last_inc >= 0.3 * max_inc;
  return out;
}

SingularityScan detect_singularities(const MathieuPotential& pot, const Window& window) {
  SingularityScan out;
  for (const auto& cp : find_critical_points(pot, window)) {
    if (!cp.t_real) continue;
    out.singularities.push_back(cp);
    bool anti = cp.n_guess * 2 + 1 == int(std::lround(std::sqrt(std::max(0.0, cp.lambda_star.real())) / kPi));
    if (!anti && cp.n_guess == 0) {
      out.notes.push_back("critical point at lambda=" + format_complex(cp.lambda_star) +
                          " has no resonant pair; multiplicity not analysed");
      continue;
    }
    double tr = std::abs(cp.t_star.real());
    double t_eval = cp.is_two_periodic ? (anti ? kPi : 0.0) : tr;

    EssEvidence ev;
    ev.point = cp;
    ev.label = cp.n_guess;
    auto es = eig(assemble(pot, t_eval, default_truncation(cp.n_guess + 2)), pot);
    std::size_t best = 0;
    for (std::size_t i = 1; i < es.lambdas.size(); ++i)
      if (std::abs(es.lambdas[i] - cp.lambda_star) < std::abs(es.lambdas[best] - cp.lambda_star)) best = i;
    ev.algebraic_multiplicity = es.cluster_size[best];
    ev.geometric_multiplicity = es.cluster_nullity[best];
    if (cp.is_two_periodic && !(ev.geometric_multiplicity == 1 && ev.algebraic_multiplicity >= 2)) continue;

    double lo = t_eval <= kPi / 2 ? t_eval : std::max(0.0, t_eval - 0.05);
    double hi = t_eval <= kPi / 2 ? std::min(kPi, t_eval + 0.05) : t_eval;
    ev.divergence = integral_inverse_dn(pot, ev.label, lo, hi);
    ev.confirmed = ev.divergence.divergence_flag;
    if (ev.confirmed) {
      out.ess.push_back(ev);
    } else if (cp.is_two_periodic) {
      out.notes.push_back("lambda=" + format_complex(cp.lambda_star) + ": single eigenvector but divergence growth " +
                          fmt(ev.divergence.growth_per_decade) + " per decade is below the 1.25 threshold");
      out.borderline.push_back(ev);
    } else {
      out.notes.push_back("lambda=" + format_complex(cp.lambda_star) + ": interior singularity at t=" +
                          fmt(tr) + ", |d|^-1 integrable (growth " + fmt(ev.divergence.growth_per_decade) + ")");
    }
  }
  return out;
}

RegionDecomposition region_decomposition(const MathieuPotential& pot, int n) {
  if (n < 2) throw ValidationError("region_decomposition: n must be >= 2");
  auto c = asymptotic_constants(pot, n);
  if (c.epsilon_n.is_zero()) throw ValidationError("region_decomposition: epsilon_n undefined (ab = 0)");
  RegionDecomposition r;
  r.n = n;
  double cap = 1.0 / (double(n) * n * n);
  double lk = std::log(4.0 * kPi * n);
  auto to_t = [&](double log_bound) { return std::min(cap, std::exp(log_bound - lk)); };
  double le = c.epsilon_n.log_magnitude, lb = c.beta_n.log_magnitude;
  r.epsilon_n = std::exp(le);
  r.beta_abs = std::exp(lb);
  double t1 = to_t(le + std::log(0.25));
  double t2 = to_t(le + std::log(1.25));
  double t4 = std::max(t2, to_t(lb));
  r.I1 = {0.0, t1};
  r.I2 = {t1, t2};
  r.I3 = {t2, cap};
  r.I4 = {t2, t4};
  r.I5 = {t4, cap};
  if (t1 < DBL_EPSILON * cap) r.notices.push_back("I1 and I2 lie below the grid resolution of [0, n^-3]");
  if (r.I4.empty()) r.notices.push_back("I4 collapses to a point");
  return r;
}

ExpansionForm expansion_form_of(const MathieuPotential& pot) {
  cplx ab = pot.a * pot.b;
  if (ab == 0.0) return ExpansionForm::Gasymov;
  if (std::abs(ab) < 16.0 / 9.0) return ExpansionForm::Elegant;
  return ExpansionForm::AsymptoticallyElegant;
}

SpectralityReport classify_operator(const MathieuPotential& pot, const AlphaInput& alpha, const ClassifyOptions& opt) {
  SpectralityReport r;
  r.pot = pot;
  double ma = std::abs(pot.a), mb = std::abs(pot.b);
  r.modulus_equal = std::abs(ma - mb) <= 1e-12 * std::max(ma, mb);
  r.expansion_form = expansion_form_of(pot);
  cplx ab = pot.a * pot.b;

  if (ab != 0.0) {
    if (auto q = std::get_if<Rational>(&alpha)) {
      r.diophantine = check_diophantine(*q);
    } else if (auto x = std::get_if<double>(&alpha)) {
      r.diophantine = check_diophantine(*x, 100000);
    } else {
      double al = alpha_of(pot);
      std::optional<Rational> exact;
      for (std::int64_t q = 1; q <= 12 && !exact; ++q) {
        double m = std::round(al * double(q));
        if (std::abs(al * double(q) - m) <= 1e-12) exact = Rational{std::int64_t(m), q};
      }
      r.diophantine = exact ? check_diophantine(*exact) : check_diophantine(al, 100000);
    }
  }

  if (pot.is_free())
    r.asymptotically_spectral = TriState::Holds;
  else if (!r.modulus_equal)
    r.asymptotically_spectral = TriState::Fails;
  else
    r.asymptotically_spectral = r.diophantine->condition8.verdict;

  if (ab.imag() == 0.0 || std::abs(ab.imag()) <= 1e-14 * std::abs(ab)) {
    bool sa = std::abs(pot.b - std::conj(pot.a)) <= 1e-14 * std::max(1.0, std::max(ma, mb));
    r.notes.push_back(sa ? "ab real and self-adjoint: spectral" : "ab real and not self-adjoint: not spectral");
  }

  if (opt.scan_singularities && !pot.is_free()) {
    double lo = -2.0 * (ma + mb) - 1.0;
    auto scan = detect_singularities(pot, window_around(lo, opt.window_hi, pot));
    r.singularities = scan.singularities;
    r.ess = scan.ess;
    r.ess_borderline = scan.borderline;
    for (auto& s : scan.notes) r.notes.push_back(s);
  }

  if (pot.is_free()) {
    r.ess_at_infinity = TriState::Fails;
  } else if (ab == 0.0) {
    r.ess_at_infinity = TriState::Holds;
  } else if (opt.ess_infinity_nmax > 0) {
    bool any = false;
    for (int n = 1; n <= opt.ess_infinity_nmax; ++n) {
      auto v = integral_inverse_dn(pot, n, -kPi, kPi);
      any = any || v.divergence_flag;
      r.infinity_evidence.push_back({n, v});
    }
    r.ess_at_infinity = any ? TriState::Undecided : TriState::Fails;
  }
  return r;
}

}  // namespace mh
