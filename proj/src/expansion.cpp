#include "mathieu/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "mathieu/asymptotics.hpp"
#include "mathieu/discriminant.hpp"

namespace mh {

TestFunction TestFunction::gaussian(double center, double width) {
  if (!(width > 0.0)) throw ValidationError("gaussian width must be positive");
  TestFunction f;
  f.kind = Kind::Gaussian;
  f.center = center;
  f.width = width;
  return f;
}

TestFunction TestFunction::modulated(double center, double width, double frequency) {
  TestFunction f = gaussian(center, width);
  f.kind = Kind::Modulated;
  f.frequency = frequency;
  return f;
}

TestFunction TestFunction::bump(double center, double support) {
  if (!(support > 0.0)) throw ValidationError("bump support must be positive");
  TestFunction f;
  f.kind = Kind::Bump;
  f.center = center;
  f.support = support;
  return f;
}

namespace {

double sinc(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0 + u * u * u * u / 120.0;
  return std::sin(u) / u;
}

}  // namespace

cplx TestFunction::operator()(double x) const {
  double y = x - center;
  switch (kind) {
    case Kind::Gaussian:
      return std::exp(-y * y / (2.0 * width * width));
    case Kind::Modulated:
      return std::exp(-y * y / (2.0 * width * width)) * std::exp(cplx(0.0, frequency * x));
    case Kind::Bump: {
      if (std::abs(y) >= support) return 0.0;
      double c = std::cos(kPi * y / (2.0 * support));
      return c * c;
    }
  }
  return 0.0;
}

cplx TestFunction::transform(double xi) const {
  switch (kind) {
    case Kind::Gaussian:
    case Kind::Modulated: {
      double u = xi - (kind == Kind::Modulated ? frequency : 0.0);
      return width * std::sqrt(kTwoPi) * std::exp(-0.5 * width * width * u * u) * std::exp(cplx(0.0, -u * center));
    }
    case Kind::Bump: {
      double s = support;
      double u = xi * s;
      double v = s * sinc(u) + 0.5 * s * (sinc(u - kPi) + sinc(u + kPi));
      return v * std::exp(cplx(0.0, -xi * center));
    }
  }
  return 0.0;
}

double TestFunction::sup_norm() const { return 1.0; }

double TestFunction::l2_norm_sq() const {
  if (kind == Kind::Bump) return 0.75 * support;
  return width * std::sqrt(kPi);
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Gaussian:
      os << "gaussian:" << center << "," << width;
      break;
    case Kind::Modulated:
      os << "modulated:" << center << "," << width << "," << frequency;
      break;
    case Kind::Bump:
      os << "bump:" << center << "," << support;
      break;
  }
  return os.str();
}

TestFunction parse_test_function(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ValidationError("test function: bad number '" + item + "'");
      }
    }
  }
  auto arg = [&](std::size_t i, double dflt) { return i < args.size() ? args[i] : dflt; };
  if (name == "gaussian" && args.size() <= 2) return TestFunction::gaussian(arg(0, 0.0), arg(1, 0.5));
  if (name == "modulated" && args.size() <= 3)
    return TestFunction::modulated(arg(0, 0.0), arg(1, 0.5), arg(2, kTwoPi));
  if (name == "bump" && args.size() <= 2) return TestFunction::bump(arg(0, 0.0), arg(1, 1.0));
  throw ValidationError("unknown test function '" + spec + "'");
}

cplx bloch_coefficient(const BlochPair& bp, const TestFunction& f) {
  const auto& c = bp.psi.coeffs;
  const auto& cs = bp.psi_star.coeffs;
  int M = bp.psi.M;
  cplx proj = 0.0, d = 0.0;
  for (int k = -M; k <= M; ++k) {
    proj += std::conj(cs[k + M]) * f.transform(kTwoPi * k + bp.psi.t);
    d += c[k + M] * std::conj(cs[k + M]);
  }
  if (d == 0.0) throw NonconvergenceError("bloch_coefficient: (Psi, Psi*) vanishes");
  return proj / d;
}

namespace {

Family family_at(double t) { return std::abs(t) > kPi / 2 ? Family::Antiperiodic : Family::Periodic; }

BlochPair pair_at(const MathieuPotential& pot, int n, double t) { return bloch_function(pot, t, n, family_at(t)); }

struct Panel {
  double a, b;
};

// [a, b] cut into dyadic panels shrinking toward the flagged ends
void graded(double a, double b, int levels, bool to_a, bool to_b, std::vector<Panel>& out) {
  if (to_a && to_b) {
    double m = 0.5 * (a + b);
    graded(a, m, levels, true, false, out);
    graded(m, b, levels, false, true, out);
    return;
  }
  if (!to_a && !to_b) {
    out.push_back({a, b});
    return;
  }
  double len = b - a;
  for (int j = 0; j < levels; ++j) {
    double w0 = len * std::ldexp(1.0, -j), w1 = len * std::ldexp(1.0, -j - 1);
    if (to_a)
      out.push_back({a + w1, a + w0});
    else
      out.push_back({b - w0, b - w1});
  }
  double w = len * std::ldexp(1.0, -levels);
  out.push_back(to_a ? Panel{a, a + w} : Panel{b - w, b});
}

struct Rule {
  std::vector<double> x, w;  // on [-1, 1]
};

template <int N>
Rule make_rule() {
  Rule r;
  const auto& ab = boost::math::quadrature::gauss<double, N>::abscissa();
  const auto& wt = boost::math::quadrature::gauss<double, N>::weights();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(wt[i]);
      continue;
    }
    r.x.push_back(ab[i]);
    r.w.push_back(wt[i]);
    r.x.push_back(-ab[i]);
    r.w.push_back(wt[i]);
  }
  return r;
}

Rule rule_of(int order) {
  switch (order) {
    case 5:
      return make_rule<5>();
    case 10:
      return make_rule<10>();
    case 15:
      return make_rule<15>();
    case 20:
      return make_rule<20>();
    case 30:
      return make_rule<30>();
  }
  throw ValidationError("gl_order must be one of 5, 10, 15, 20, 30");
}

int lower_order(int order) { return order == 5 ? 5 : (order == 10 ? 5 : (order == 15 ? 10 : (order == 20 ? 10 : 15))); }

// sum over panels of w * g(t), g writing into acc (size = eval points)
void integrate_panels(const std::vector<Panel>& panels, const Rule& rule,
                      const std::function<void(double, double, std::vector<cplx>&)>& g, std::vector<cplx>& acc,
                      long& nodes) {
  for (const auto& p : panels) {
    double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      g(mid + half * rule.x[i], half * rule.w[i], acc);
      ++nodes;
    }
  }
}

}  // namespace

cplx bloch_coefficient(const MathieuPotential& pot, const TestFunction& f, int n, double t) {
  return bloch_coefficient(pair_at(pot, n, t), f);
}

cplx evaluate_bloch(const BlochFunction& psi, double x) {
  cplx s = 0.0;
  for (int k = -psi.M; k <= psi.M; ++k) s += psi.coeffs[k + psi.M] * std::exp(cplx(0.0, (kTwoPi * k + psi.t) * x));
  return s;
}

cplx single_integrand(const MathieuPotential& pot, const TestFunction& f, int n, double t, double x) {
  auto bp = pair_at(pot, n, t);
  return bloch_coefficient(bp, f) * evaluate_bloch(bp.psi, x);
}

cplx pair_integrand(const MathieuPotential& pot, const TestFunction& f, int n, int partner, double t, double x) {
  return single_integrand(pot, f, n, t, x) + single_integrand(pot, f, partner, t, x);
}

std::vector<double> default_eval_points(const TestFunction& f, int count) {
  if (count < 1) throw ValidationError("eval point count must be positive");
  double span = f.kind == TestFunction::Kind::Bump ? 0.8 * f.support : 2.0 * f.width;
  std::vector<double> xs;
  for (int i = 0; i < count; ++i)
    xs.push_back(count == 1 ? f.center : f.center - span + 2.0 * span * i / double(count - 1));
  return xs;
}

ResidualReport reconstruct(const MathieuPotential& pot, const TestFunction& f, const ExpansionPlan& plan,
                           const std::vector<double>& eval_points) {
  if (plan.n_max < 1) throw ValidationError("reconstruct: n_max must be >= 1");
  if (eval_points.empty()) throw ValidationError("reconstruct: no evaluation points");
  ExpansionForm verdict = expansion_form_of(pot);
  if (!pot.is_free() && verdict != plan.form)
    throw ValidationError("reconstruct: form " + to_string(plan.form) + " does not match the operator's " +
                          to_string(verdict) + " form");
  if (plan.form == ExpansionForm::Gasymov && !(plan.h > 0.0 && plan.h < kSeriesZone))
    throw ValidationError("reconstruct: h must satisfy 0 < h < 1/(15 pi)");

  ResidualReport rep;
  rep.form = plan.form;
  rep.n_max = plan.n_max;
  const int N = plan.n_max;
  const std::size_t P = eval_points.size();

  std::set<int> S(plan.S_set.begin(), plan.S_set.end());
  if (plan.form == ExpansionForm::AsymptoticallyElegant && plan.detect_S) {
    double hi = std::pow(kTwoPi * (N + 1), 2);
    auto scan = detect_singularities(pot, window_around(-2.0 * (std::abs(pot.a) + std::abs(pot.b)) - 1.0, hi, pot));
    for (const auto& e : scan.ess) {
      int m = e.label;
      bool anti = e.point.family == CriticalFamily::Antiperiodic ||
                  (e.point.family == CriticalFamily::Interior && std::abs(e.point.t_star.real()) > kPi / 2);
      S.insert(m);
      S.insert(anti ? -m - 1 : -m);
    }
    rep.notes.push_back("S detected over lambda <= " + std::to_string(hi) + " only");
  }
  if (plan.form == ExpansionForm::AsymptoticallyElegant) rep.S_set.assign(S.begin(), S.end());
  if (plan.form == ExpansionForm::Gasymov) rep.h = plan.h;

  // sample: adds w * sum_{labels} a_n Psi_n(x_j) into acc
  auto term = [&](const std::vector<int>& labels, double t, double w, std::vector<cplx>& acc) {
    std::vector<cplx> group(P, 0.0);
    for (int n : labels) {
      BlochPair bp;
      try {
        bp = pair_at(pot, n, t);
      } catch (const NonconvergenceError& e) {
        throw NonconvergenceError(std::string("reconstruct: ") + e.what());
      }
      cplx a = bloch_coefficient(bp, f);
      for (std::size_t j = 0; j < P; ++j) group[j] += a * evaluate_bloch(bp.psi, eval_points[j]);
    }
    for (std::size_t j = 0; j < P; ++j) acc[j] += w * group[j];
  };

  std::vector<int> all;
  for (int n = -N; n <= N; ++n) all.push_back(n);

  auto run = [&](const Rule& rule, long& nodes) {
    std::vector<cplx> acc(P, 0.0);
    if (plan.form != ExpansionForm::Gasymov) {
      int L = plan.dyadic_levels;
      std::vector<Panel> panels;
      graded(-kPi, -kPi / 2, L, true, false, panels);
      graded(-kPi / 2, 0.0, L, false, true, panels);
      graded(0.0, kPi / 2, L, true, false, panels);
      graded(kPi / 2, kPi, L, false, true, panels);
      std::vector<int> rest;
      for (int n : all)
        if (!S.count(n)) rest.push_back(n);
      std::vector<int> grouped(S.begin(), S.end());
      integrate_panels(
          panels, rule,
          [&](double t, double w, std::vector<cplx>& a) {
            if (!grouped.empty()) term(grouped, t, w, a);
            for (int n : rest) term({n}, t, w, a);
          },
          acc, nodes);
    } else {
      double h = plan.h;
      std::vector<Panel> zero, pi_hi, middle;
      graded(-h, 0.0, 4, false, true, zero);
      graded(0.0, h, 4, true, false, zero);
      graded(kPi - h, kPi, 4, false, true, pi_hi);
      graded(-kPi, -kPi + h, 4, true, false, pi_hi);
      graded(h, kPi - h, 8, true, true, middle);
      graded(-kPi + h, -h, 8, true, true, middle);
      integrate_panels(
          zero, rule,
          [&](double t, double w, std::vector<cplx>& a) {
            term({0}, t, w, a);
            for (int n = 1; n <= N; ++n) term({n, -n}, t, w, a);
          },
          acc, nodes);
      integrate_panels(
          pi_hi, rule,
          [&](double t, double w, std::vector<cplx>& a) {
            for (int n = 0; n <= N; ++n) term({n, -n - 1}, t, w, a);
          },
          acc, nodes);
      // t in (-pi, -pi + h] is t + 2 pi in (pi, pi + h], where label n + 1 plays the role of n
      integrate_panels(
          middle, rule,
          [&](double t, double w, std::vector<cplx>& a) {
            for (int n : all) term({n}, t, w, a);
          },
          acc, nodes);
    }
    for (auto& v : acc) v /= kTwoPi;
    return acc;
  };

  long nodes = 0, nodes_low = 0;
  auto rec = run(rule_of(plan.gl_order), nodes);
  auto rec_low = run(rule_of(lower_order(plan.gl_order)), nodes_low);
  rep.t_nodes = nodes;
  double scale = f.sup_norm();
  double sum = 0.0;
  for (std::size_t j = 0; j < P; ++j) {
    PointResidual pr;
    pr.x = eval_points[j];
    pr.f = f(pr.x);
    pr.reconstruction = rec[j];
    pr.residual = std::abs(rec[j] - pr.f) / scale;
    rep.max_residual = std::max(rep.max_residual, pr.residual);
    sum += pr.residual;
    rep.quadrature_delta = std::max(rep.quadrature_delta, std::abs(rec[j] - rec_low[j]) / scale);
    rep.per_point.push_back(pr);
  }
  rep.mean_residual = sum / double(P);
  if (!std::isfinite(rep.quadrature_delta) || rep.quadrature_delta > 0.1)
    throw NonconvergenceError("reconstruct: t-quadrature unstable (change " + std::to_string(rep.quadrature_delta) +
                              " against the lower-order rule)");

  if (plan.form == ExpansionForm::Gasymov) {
    Rule r = rule_of(10);
    double x0 = eval_points[P / 2];
    for (int k = 3; k <= 7; ++k) {
      double delta = std::pow(10.0, -k);
      std::vector<Panel> panels;
      for (double lo = delta; lo < plan.h; lo *= 10.0) panels.push_back({lo, std::min(plan.h, 10.0 * lo)});
      double v = 0.0;
      for (const auto& p : panels) {
        double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
        for (std::size_t i = 0; i < r.x.size(); ++i)
          v += half * r.w[i] * std::abs(single_integrand(pot, f, 1, mid + half * r.x[i], x0));
      }
      rep.single_term_trace.push_back({delta, v});
    }
  }
  return rep;
}

double coefficient_energy(const MathieuPotential& pot, const TestFunction& f, int n_max, int gl_order) {
  Rule rule = rule_of(gl_order);
  std::vector<Panel> panels;
  graded(-kPi, 0.0, 20, false, true, panels);
  graded(0.0, kPi, 20, true, false, panels);
  double total = 0.0;
  for (int n = -n_max; n <= n_max; ++n)
    for (const auto& p : panels) {
      double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
      for (std::size_t i = 0; i < rule.x.size(); ++i)
        total += half * rule.w[i] * std::norm(bloch_coefficient(pot, f, n, mid + half * rule.x[i]));
    }
  return total / kTwoPi;
}

}  // namespace mh
