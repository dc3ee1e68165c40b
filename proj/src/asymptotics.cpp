#include "mathieu/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "mathieu/floquet.hpp"
#include "mathieu/pair.hpp"

namespace mh {

std::string to_string(SeriesFamily f) { return f == SeriesFamily::Periodic ? "periodic" : "antiperiodic"; }

ResonantSites resonant_sites(int n, SeriesFamily family) {
  if (family == SeriesFamily::Periodic) {
    if (n < 1) throw ValidationError("resonant_sites: periodic family needs n >= 1");
    return {n, -n};
  }
  if (n < 0) throw ValidationError("resonant_sites: antiperiodic family needs n >= 0");
  return {n, -n - 1};
}

namespace {

cplx site_gap(cplx lambda, int site, double t) {
  cplx g = lambda - diag_entry(site, t);
  if (std::abs(g) < 1e-6)
    throw ValidationError("series: lambda within 1e-6 of the pole at site " + std::to_string(site));
  return g;
}

// Row-ordered walk products: a step from site i to i-1 carries H[i][i-1] = b, to i+1 carries a.
struct Walker {
  const MathieuPotential& pot;
  cplx lambda;
  double t;
  int p, q;

  // sum over walks base -> target with exactly k intermediate sites avoiding {p, q}
  cplx walks(int base, int target, int k) const {
    std::function<cplx(int, int)> rec = [&](int site, int left) -> cplx {
      if (left == 0) {
        if (site - 1 == target) return pot.b;
        if (site + 1 == target) return pot.a;
        return 0.0;
      }
      if (std::abs(site - target) > left + 1) return 0.0;
      cplx sum = 0.0;
      for (int dir : {-1, 1}) {
        int next = site + dir;
        if (next == p || next == q) continue;
        cplx step = dir < 0 ? pot.b : pot.a;
        if (step == 0.0) continue;
        sum += step / site_gap(lambda, next, t) * rec(next, left - 1);
      }
      return sum;
    };
    return rec(base, k);
  }
};

SeriesFamily family_for(double t_abs) { return t_abs > kPi / 2 ? SeriesFamily::Antiperiodic : SeriesFamily::Periodic; }

cplx principal_sqrt(cplx z) {
  // -pi < arg D <= pi: a negative real D sits on the upper side of the cut
  if (z.imag() == 0.0) z = cplx(z.real(), 0.0);
  return std::sqrt(z);
}

}  // namespace

LeadingB b_series_leading(const MathieuPotential& pot, int n, cplx lambda, double t, SeriesFamily family,
                          bool primed) {
  auto s = resonant_sites(n, family);
  int span = s.p - s.q;
  LeadingB out;
  out.order = span - 1;
  cplx base = primed ? pot.a : pot.b;
  if (base == 0.0) {
    out.value = LogComplex::zero();
    return out;
  }
  LogComplex v = LogComplex::from(base).pow(span);
  for (int site = s.q + 1; site < s.p; ++site) v = v / LogComplex::from(site_gap(lambda, site, t));
  out.value = v;
  return out;
}

SeriesValue A_series(const MathieuPotential& pot, int n, cplx lambda, double t, int k_max, SeriesFamily family,
                     bool primed) {
  if (k_max < 1) throw ValidationError("A_series: k_max must be >= 1");
  auto s = resonant_sites(n, family);
  Walker w{pot, lambda, t, s.p, s.q};
  int base = primed ? s.q : s.p;
  SeriesValue out;
  out.k_max = k_max;
  for (int k = 1; k <= k_max; ++k) {
    // closed walks of even length k + 1 only exist for odd k
    cplx term = (k % 2 == 0) ? cplx(0.0) : w.walks(base, base, k);
    out.terms.push_back(term);
    out.value += term;
  }
  double prev = -1.0;
  for (int k = 1; k <= k_max; k += 2) {
    double m = std::abs(out.terms[k - 1]);
    if (prev >= 0.0 && m > prev && m > 0.0) out.decreasing = false;
    if (m > 0.0 || prev < 0.0) prev = m;
  }
  // geometric tail from the last two odd-order terms
  int last = (k_max % 2 == 1) ? k_max : k_max - 1;
  double tl = std::abs(out.terms[last - 1]);
  double tp = last >= 3 ? std::abs(out.terms[last - 3]) : 0.0;
  if (tl == 0.0) {
    out.tail_bound = 0.0;
  } else if (tp > 0.0 && tl < tp) {
    double r = tl / tp;
    out.tail_bound = tl * r / (1.0 - r);
  } else {
    out.tail_bound = INFINITY;
  }
  return out;
}

DTerm D_of(const MathieuPotential& pot, int n, cplx lambda, double t, SeriesFamily family) {
  auto s = resonant_sites(n, family);
  DTerm d;
  d.a_value = A_series(pot, n, lambda, t, 9, family, false).value;
  d.a_prime_value = A_series(pot, n, lambda, t, 9, family, true).value;
  d.c_value = 0.5 * (d.a_value - d.a_prime_value);
  d.shift = 0.5 * (diag_entry(s.p, t) - diag_entry(s.q, t));
  d.b_value = b_series_leading(pot, n, lambda, t, family, false).value;
  d.b_prime_value = b_series_leading(pot, n, lambda, t, family, true).value;
  d.b_tail_factor = n >= 1 ? 10.0 / (double(n) * n) : 10.0;
  cplx h = d.shift + d.c_value;
  cplx bb = (d.b_value * d.b_prime_value).value();
  d.d_value = h * h + bb;
  cplx root = principal_sqrt(d.d_value);
  for (int i = 0; i < 2; ++i) {
    double sg = i == 0 ? -1.0 : 1.0;
    d.e_minus[i] = sg * root - h;
    d.e_plus[i] = sg * root + h;
  }
  cplx mean = 0.5 * (diag_entry(s.p, t) + diag_entry(s.q, t));
  cplx lhs = lambda - mean - 0.5 * (d.a_value + d.a_prime_value);
  d.s_branch = std::abs(lhs + root) <= std::abs(lhs - root) ? -1 : 1;
  auto c = asymptotic_constants(pot, n);
  LogComplex ab = family == SeriesFamily::Periodic ? c.alpha_n * c.beta_n : c.tilde_alpha_n * c.tilde_beta_n;
  int i = d.s_branch < 0 ? 0 : 1;
  if (ab.is_zero()) {
    d.product_defect = NAN;
  } else {
    LogComplex e = LogComplex::from(d.e_plus[i] * d.e_minus[i]);
    d.product_defect = std::abs((e / ab).value() - 1.0);
  }
  return d;
}

PredictedDegeneracy predict_double(const MathieuPotential& pot, int n, SeriesFamily family) {
  if (n < 1 && family == SeriesFamily::Periodic) throw ValidationError("predict_double: periodic family needs n >= 1");
  if (n < 0) throw ValidationError("predict_double: n must be >= 0");
  auto c = asymptotic_constants(pot, n);
  PredictedDegeneracy out;
  out.n = n;
  out.family = family;
  out.product = family == SeriesFamily::Periodic ? c.alpha_n * c.beta_n : c.tilde_alpha_n * c.tilde_beta_n;
  double kappa = family == SeriesFamily::Periodic ? 4.0 * kPi * n : kTwoPi * (2 * n + 1);
  if (family == SeriesFamily::Antiperiodic && n == 0) out.note = "outside asymptotic validity";
  if (out.product.is_zero()) {
    out.product_phase = 0.0;
    out.real_predicted = true;
    out.t_pred = LogComplex::zero();
    if (out.note.empty()) out.note = "ab = 0: exact degeneracy at the band edge";
  } else {
    out.product_phase = out.product.phase;
    // phase of beta alpha at pi means -beta alpha is a positive real number
    double off = std::abs(wrap_phase(out.product_phase - kPi));
    double nn = std::max(1, n);
    auto model = [&](double cc) {
      DegeneracySensitivity s;
      s.c = cc;
      s.real_predicted = off <= 3.0 * cc / (nn * nn) + 1e-12;
      double lhs = 1.0 - cc / (nn * nn);
      double re = -(1.0 + cc / (nn * nn) + 1.0 / (nn * nn * nn)) * out.product.value().real();
      s.t_pred = (s.real_predicted && lhs > 0.0 && re >= 0.0) ? std::sqrt(re / lhs) / kappa : NAN;
      return s;
    };
    for (double cc : {0.0, 1.0, 10.0}) out.sensitivity.push_back(model(cc));
    out.real_predicted = out.sensitivity[0].real_predicted;
    if (out.real_predicted) {
      // sqrt(Re(-beta alpha)) / kappa in log scale
      double re_over = -std::cos(out.product.phase);
      out.t_pred = LogComplex::polar_log(0.5 * (out.product.log_magnitude + std::log(re_over)) - std::log(kappa), 0.0);
    } else {
      out.t_pred = LogComplex::zero();
      if (out.note.empty()) out.note = "no real degeneracy predicted";
    }
  }
  return out;
}

cplx asymptotic_lambda(const MathieuPotential& pot, int n, double t, int j) {
  if (j != 1 && j != 2) throw ValidationError("asymptotic_lambda: branch j must be 1 or 2");
  double ta = std::abs(std::remainder(t, kTwoPi));
  if (ta > kSeriesZone && ta < kPi - kSeriesZone) {
    double w = kTwoPi * n + ta;
    return w * w;
  }
  SeriesFamily family = family_for(ta);
  auto s = resonant_sites(n, family);
  cplx mean = 0.5 * (diag_entry(s.p, ta) + diag_entry(s.q, ta));
  double sg = j == 1 ? -1.0 : 1.0;
  cplx lam = mean + sg * 0.5 * (diag_entry(s.p, ta) - diag_entry(s.q, ta));
  if (ta == 0.0 || ta == kPi) lam = mean;
  for (int it = 0; it < 200; ++it) {
    auto d = D_of(pot, n, lam, ta, family);
    cplx next = mean + 0.5 * (d.a_value + d.a_prime_value) + sg * principal_sqrt(d.d_value);
    bool done = std::abs(next - lam) <= 1e-14 * std::abs(next);
    lam = next;
    if (done) break;
  }
  return lam;
}

std::vector<ComparisonRow> compare_with_engine(const MathieuPotential& pot, int n, const std::vector<double>& t_grid) {
  std::vector<ComparisonRow> rows;
  for (double t : t_grid) {
    double ta = std::abs(std::remainder(t, kTwoPi));
    bool interior = ta > kSeriesZone && ta < kPi - kSeriesZone;
    auto pr = band_pair(pot, ta, n, default_truncation(std::abs(n) + 2));
    std::vector<int> branches = interior ? std::vector<int>{0} : std::vector<int>{1, 2};
    for (int j : branches) {
      ComparisonRow r;
      r.n = n;
      r.t = t;
      r.branch = j;
      r.formula = asymptotic_lambda(pot, n, t, j == 0 ? 2 : j);
      int idx = j == 0 ? pick_root(pr, sites_for_label(n, ta).sign) : pick_root_near(pr, r.formula);
      r.engine = pr.lambda[idx];
      r.abs_err = std::abs(r.formula - r.engine);
      r.rel_err = r.abs_err / std::max(1.0, std::abs(r.engine));
      rows.push_back(r);
    }
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os.precision(12);
  os << "n,t,formula_value,engine_value,abs_err,rel_err,branch\n";
  for (const auto& r : rows)
    os << r.n << "," << r.t << "," << format_complex(r.formula) << "," << format_complex(r.engine) << "," << r.abs_err
       << "," << r.rel_err << "," << r.branch << "\n";
  return os.str();
}

}  // namespace mh
