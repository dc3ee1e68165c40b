#include <cmath>

#include "doctest.h"
#include "mathieu/asymptotics.hpp"
#include "mathieu/expansion.hpp"

using namespace mh;

namespace {

// trapezoid rule on a wide window; the integrands are smooth and decay (or vanish) at the ends
cplx numeric_transform(const TestFunction& f, double xi, double lo, double hi, int n = 40000) {
  double h = (hi - lo) / n;
  cplx s = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = lo + i * h;
    cplx v = f(x) * std::exp(cplx(0.0, -xi * x));
    s += (i == 0 || i == n) ? 0.5 * v : v;
  }
  return s * h;
}

}  // namespace

TEST_CASE("closed-form transforms match quadrature") {
  for (auto f : {TestFunction::gaussian(0.3, 0.5), TestFunction::modulated(-0.2, 0.4, 6.0),
                 TestFunction::bump(0.1, 0.8)})
    for (double xi : {0.0, 1.7, -5.0, 12.0}) {
      cplx ref = numeric_transform(f, xi, f.center - 8.0, f.center + 8.0);
      CHECK(std::abs(f.transform(xi) - ref) <= 1e-8);
    }
}

TEST_CASE("test function norms") {
  auto g = TestFunction::gaussian(0.0, 0.5);
  CHECK(g.l2_norm_sq() == doctest::Approx(0.5 * std::sqrt(kPi)));
  auto b = TestFunction::bump(0.0, 2.0);
  double s = 0.0;
  int n = 20000;
  for (int i = 0; i <= n; ++i) {
    double x = -2.0 + 4.0 * i / n;
    s += std::norm(b(x)) * ((i == 0 || i == n) ? 0.5 : 1.0);
  }
  CHECK(b.l2_norm_sq() == doctest::Approx(s * 4.0 / n).epsilon(1e-8));
  CHECK(std::abs(b(2.5)) == 0.0);
}

TEST_CASE("test function specs") {
  auto f = parse_test_function("modulated:0.5,0.25,3");
  CHECK(f.kind == TestFunction::Kind::Modulated);
  CHECK(f.center == 0.5);
  CHECK(f.width == 0.25);
  CHECK(f.frequency == 3.0);
  CHECK(parse_test_function("bump:0,1.5").support == 1.5);
  auto dflt = parse_test_function("gaussian:1");
  CHECK(dflt.center == 1.0);
  CHECK(dflt.width == 0.5);
  for (const char* bad : {"", "gaussian:0,-1", "gaussian:0,x", "wave:0,1", "bump:0,1,2"})
    CHECK_THROWS_AS(parse_test_function(bad), ValidationError);
}

TEST_CASE("free operator: coefficients are the Fourier transform") {
  MathieuPotential pot{0.0, 0.0};
  auto f = TestFunction::gaussian(0.2, 0.4);
  for (int n = -3; n <= 3; ++n)
    for (double t : {0.4, 2.0, -1.1}) {
      double xi = kTwoPi * n + std::abs(t);
      if (t < 0) xi = -(kTwoPi * n + std::abs(t));
      CHECK(std::abs(std::abs(bloch_coefficient(pot, f, n, t)) - std::abs(f.transform(xi))) <= 1e-12);
    }
}

TEST_CASE("free operator: Parseval") {
  auto f = TestFunction::gaussian(0.0, 0.5);
  CHECK(coefficient_energy({0.0, 0.0}, f, 15) == doctest::Approx(f.l2_norm_sq()).epsilon(1e-9));
}

TEST_CASE("a_n Psi_n does not depend on the phases of Psi and Psi*") {
  MathieuPotential pot{1.0, cplx(2.0, 0.5)};
  auto f = TestFunction::modulated(0.1, 0.5, 2.0);
  auto bp = bloch_function(pot, 0.8, 1, Family::Periodic);
  cplx ref = bloch_coefficient(bp, f) * evaluate_bloch(bp.psi, 0.37);
  cplx g1 = std::exp(cplx(0.0, 0.9)), g2 = std::exp(cplx(0.0, -2.1));
  for (auto& c : bp.psi.coeffs) c *= 3.0 * g1;
  for (auto& c : bp.psi_star.coeffs) c *= 0.5 * g2;
  cplx got = bloch_coefficient(bp, f) * evaluate_bloch(bp.psi, 0.37);
  CHECK(std::abs(got - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
}

TEST_CASE("coefficients of a smooth function decay in n") {
  MathieuPotential pot{1.0, 2.0};
  auto f = TestFunction::gaussian(0.0, 0.3);
  double prev = INFINITY;
  for (int n = 2; n <= 8; ++n) {
    double a = std::abs(bloch_coefficient(pot, f, n, 0.5));
    CHECK(a < prev);
    prev = a;
  }
}

TEST_CASE("elegant form: residual falls as bands are added") {
  MathieuPotential pot{0.3, 0.3};
  auto f = TestFunction::gaussian(0.0, 0.1);
  auto pts = default_eval_points(f, 5);
  double prev = INFINITY;
  for (int nm : {2, 4, 8}) {
    ExpansionPlan plan;
    plan.form = ExpansionForm::Elegant;
    plan.n_max = nm;
    auto r = reconstruct(pot, f, plan, pts);
    CHECK(r.max_residual < prev);
    CHECK(r.quadrature_delta <= 1e-6);
    prev = r.max_residual;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("Gasymov: the paired integrand stays bounded at the band edge") {
  MathieuPotential pot{0.0, 1.0};
  auto f = TestFunction::gaussian(0.0, 0.5);
  double worst_pair = 0.0, worst_single = 0.0;
  for (double dlt : {1e-3, 1e-5, 1e-7}) {
    worst_pair = std::max(worst_pair, std::abs(pair_integrand(pot, f, 0, -1, kPi - dlt, 0.3)));
    worst_single = std::max(worst_single, std::abs(single_integrand(pot, f, 0, kPi - dlt, 0.3)));
  }
  CHECK(worst_pair <= 2.0);
  CHECK(worst_single > 10.0 * worst_pair);
}

TEST_CASE("Gasymov reconstruction") {
  MathieuPotential pot{0.0, 1.0};
  auto f = TestFunction::gaussian(0.0, 0.5);
  ExpansionPlan plan;
  plan.form = ExpansionForm::Gasymov;
  plan.n_max = 8;
  plan.h = 0.02;
  auto r = reconstruct(pot, f, plan, default_eval_points(f));
  CHECK(r.max_residual <= 5e-2);
  REQUIRE(r.single_term_trace.size() == 5);
  CHECK(r.single_term_trace.back().second > r.single_term_trace.front().second);
}

TEST_CASE("asymptotically elegant reconstruction") {
  MathieuPotential pot{2.0, 2.0};
  auto f = TestFunction::gaussian(0.0, 0.5);
  ExpansionPlan plan;
  plan.form = ExpansionForm::AsymptoticallyElegant;
  plan.n_max = 6;
  auto r = reconstruct(pot, f, plan, default_eval_points(f, 5));
  CHECK(r.max_residual <= 1e-6);
}

TEST_CASE("reconstruction input validation") {
  auto f = TestFunction::gaussian(0.0, 0.5);
  ExpansionPlan plan;
  plan.form = ExpansionForm::Gasymov;
  plan.n_max = 2;
  CHECK_THROWS_AS(reconstruct({1.0, 1.0}, f, plan, {0.0}), ValidationError);
  plan.h = 0.0;
  CHECK_THROWS_AS(reconstruct({0.0, 1.0}, f, plan, {0.0}), ValidationError);
  plan.h = kSeriesZone;
  CHECK_THROWS_AS(reconstruct({0.0, 1.0}, f, plan, {0.0}), ValidationError);
  plan.h = 0.02;
  plan.gl_order = 7;
  CHECK_THROWS_AS(reconstruct({0.0, 1.0}, f, plan, {0.0}), ValidationError);

  // the free operator accepts every form
  ExpansionPlan any;
  any.n_max = 6;
  for (auto form : {ExpansionForm::Elegant, ExpansionForm::AsymptoticallyElegant, ExpansionForm::Gasymov}) {
    any.form = form;
    CHECK(reconstruct({0.0, 0.0}, f, any, {0.0, 0.5}).max_residual <= 1e-8);
  }
}
