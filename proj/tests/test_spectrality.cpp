#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "mathieu/spectrality.hpp"

using namespace mh;

namespace {

ClassifyOptions quick() {
  ClassifyOptions o;
  o.scan_singularities = false;
  o.ess_infinity_nmax = 0;
  return o;
}

// |(Psi, Psi*)| from dense right eigenvectors of H(t) and its transpose, nearest to lam
double dense_abs_d(const MathieuPotential& pot, double t, cplx lam, int M = 30) {
  Eigen::MatrixXcd H = assemble(pot, t, M).dense();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> right(H), left(H.transpose());
  Eigen::Index i, j;
  (right.eigenvalues().array() - lam).abs().minCoeff(&i);
  (left.eigenvalues().array() - lam).abs().minCoeff(&j);
  Eigen::VectorXcd v = right.eigenvectors().col(i), w = left.eigenvectors().col(j);
  return std::abs(w.dot(v.conjugate())) / (w.norm() * v.norm());
}

}  // namespace

TEST_CASE("self-adjoint potential: |d| = 1 and the full-interval integral is 2 pi") {
  MathieuPotential pot{cplx(1.0, 0.5), cplx(1.0, -0.5)};
  for (int n = -3; n <= 3; ++n)
    for (double t : {-2.9, -0.7, 0.3, 1.2, 2.5}) CHECK(std::abs(abs_dn(pot, n, t) - 1.0) <= 1e-8);
  auto v = integral_inverse_dn(pot, 1, -kPi, kPi);
  CHECK(v.value == doctest::Approx(kTwoPi).epsilon(1e-7));
  CHECK_FALSE(v.divergence_flag);
}

TEST_CASE("|d_n| matches dense left/right eigenvectors at t and -t") {
  for (MathieuPotential pot : {MathieuPotential{1.0, 2.0}, MathieuPotential{cplx(0.3, 1.0), cplx(-1.0, 0.2)}})
    for (int n : {-2, 0, 1, 4})
      for (double t : {0.1, 1.0, 2.2, 3.1}) {
        auto bp = bloch_function(pot, t, n, t > kPi / 2 ? Family::Antiperiodic : Family::Periodic);
        CHECK(std::abs(dense_abs_d(pot, t, bp.psi.lambda) - std::abs(bp.d)) <= 1e-8);
        CHECK(std::abs(dense_abs_d(pot, -t, bp.psi.lambda) - std::abs(bp.d)) <= 1e-8);
        CHECK(std::abs(abs_dn(pot, n, -t) - abs_dn(pot, n, t)) <= 1e-8);
      }
}

TEST_CASE("unequal moduli: |d_n(0)| shrinks with n") {
  MathieuPotential pot{1.0, 2.0};
  double prev = 1.0;
  for (int n = 1; n <= 8; ++n) {
    double d = abs_dn(pot, n, 0.0);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("|d_n| stays near one away from the band edges") {
  for (MathieuPotential pot : {MathieuPotential{1.0, 2.0}, MathieuPotential{1.0, 1.0}, MathieuPotential{1.0, -1.0},
                               MathieuPotential{0.0, 1.0}})
    for (int n = -8; n <= 8; ++n)
      for (double t = 0.2; t < kPi - 0.2; t += 0.25) CHECK(std::abs(abs_dn(pot, n, t) - 1.0) <= 0.5);
}

TEST_CASE("profile: the two methods agree where both are valid") {
  MathieuPotential pot{1.0, 2.0};
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.1 + 2.9 * i / 20.0);
  auto p = dn_profile(pot, 1, grid);
  CHECK(p.samples.size() == grid.size());
  CHECK(p.both_fraction > 0.9);
  CHECK(p.max_disagreement <= 1e-3);
  CHECK(p.sup_inverse >= 1.0);
  auto nocross = dn_profile(pot, 1, grid, 0);
  for (const auto& s : nocross.samples) CHECK_FALSE(s.cross.has_value());
}

TEST_CASE("degeneracy points of (1,-1), band 1") {
  auto pts = degeneracy_points({1.0, -1.0}, 1);
  REQUIRE(pts.size() == 2);
  for (double t : pts) CHECK(kPi - std::abs(t) == doctest::Approx(8.51e-6).epsilon(2e-3));
  CHECK(degeneracy_points({1.0, 2.0}, 3).empty());
}

TEST_CASE("divergence diagnostic") {
  auto edge = integral_inverse_dn({0.0, 1.0}, 0, kPi - 0.05, kPi);
  CHECK(edge.divergence_flag);
  CHECK(edge.trace.size() == 5);
  for (std::size_t i = 1; i < edge.trace.size(); ++i) CHECK(edge.trace[i].second > edge.trace[i - 1].second);
  CHECK(edge.growth_per_decade >= 1.25);

  auto smooth = integral_inverse_dn({1.0, 1.0}, 2, 0.3, 1.0);
  CHECK_FALSE(smooth.divergence_flag);
  CHECK(smooth.value == doctest::Approx(0.7).epsilon(0.05));
}

TEST_CASE("region decomposition is ordered and bounded by n^-3") {
  MathieuPotential pot{1.0, 2.0};
  for (int n = 2; n <= 6; ++n) {
    auto r = region_decomposition(pot, n);
    CHECK(r.I1.lo == 0.0);
    CHECK(r.I1.hi == doctest::Approx(r.I2.lo));
    CHECK(r.I2.hi == doctest::Approx(r.I3.lo));
    CHECK(r.I3.hi == doctest::Approx(std::pow(n, -3.0)));
    CHECK(r.I4.lo == doctest::Approx(r.I2.hi));
    CHECK(r.I5.lo == doctest::Approx(r.I4.hi));
    CHECK(r.I5.hi == doctest::Approx(std::pow(n, -3.0)));
    // projection norms are of order one on the outer region
    for (int i = 1; i <= 10; ++i) {
      double t = r.I5.lo + (r.I5.hi - r.I5.lo) * i / 10.0;
      double d = abs_dn(pot, n, t);
      CHECK(d >= 0.2);
      CHECK(d <= 5.0);
    }
  }
  auto eq = region_decomposition({1.0, 1.0}, 3);
  CHECK(eq.I4.empty());
  CHECK_THROWS_AS(region_decomposition({0.0, 1.0}, 3), ValidationError);
  CHECK_THROWS_AS(region_decomposition({1.0, 2.0}, 1), ValidationError);
}

TEST_CASE("expansion form from |ab|") {
  CHECK(expansion_form_of({1.0, 1.0}) == ExpansionForm::Elegant);
  CHECK(expansion_form_of({0.5, 0.5}) == ExpansionForm::Elegant);
  CHECK(expansion_form_of({2.0, 2.0}) == ExpansionForm::AsymptoticallyElegant);
  CHECK(expansion_form_of({2.0, 3.0}) == ExpansionForm::AsymptoticallyElegant);
  CHECK(expansion_form_of({0.0, 5.0}) == ExpansionForm::Gasymov);
}

TEST_CASE("classification without the singularity scan") {
  auto r11 = classify_operator({1.0, 1.0}, {}, quick());
  CHECK(r11.modulus_equal);
  CHECK(r11.asymptotically_spectral == TriState::Holds);

  auto r23 = classify_operator({2.0, 3.0}, {}, quick());
  CHECK_FALSE(r23.modulus_equal);
  CHECK(r23.asymptotically_spectral == TriState::Fails);

  auto rm = classify_operator({1.0, -1.0}, {}, quick());
  REQUIRE(rm.diophantine);
  CHECK(rm.diophantine->condition8.verdict == TriState::Fails);
  CHECK(rm.diophantine->condition8.witness->first == 1);
  CHECK(rm.diophantine->condition8.witness->second == 1);
  CHECK(rm.asymptotically_spectral == TriState::Fails);

  // explicit rational overrides the recovered one
  auto r23q = classify_operator({cplx(0.0, 1.0), 1.0}, Rational{2, 3}, quick());
  REQUIRE(r23q.diophantine);
  CHECK(r23q.diophantine->rational_input->str() == "2/3");

  bool note = false;
  for (const auto& s : r11.notes) note = note || s.find("self-adjoint: spectral") != std::string::npos;
  CHECK(note);
}

TEST_CASE("Gasymov band edge at pi^2 is an essential singularity") {
  MathieuPotential pot{0.0, 1.0};
  auto scan = detect_singularities(pot, window_around(1.0, 20.0, pot));
  REQUIRE(scan.ess.size() == 1);
  const auto& e = scan.ess.front();
  CHECK(e.point.lambda_star.real() == doctest::Approx(kPi * kPi).epsilon(1e-8));
  CHECK(e.algebraic_multiplicity == 2);
  CHECK(e.geometric_multiplicity == 1);
  CHECK(e.divergence.divergence_flag);
  CHECK(e.confirmed);
}
