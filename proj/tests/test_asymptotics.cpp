#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "mathieu/asymptotics.hpp"
#include "mathieu/floquet.hpp"

using namespace mh;

namespace {

// H_{r,rest} (lambda - H_rest)^{-1} H_{rest,c} on the full truncation: [A_pp, A_qq, S_pq, S_qp]
std::array<cplx, 4> schur(const MathieuPotential& pot, int p, int q, cplx lam, double t, int M) {
  Eigen::MatrixXcd H = assemble(pot, t, M).dense();
  int N = int(H.rows());
  std::vector<int> rest;
  for (int i = 0; i < N; ++i)
    if (i != p + M && i != q + M) rest.push_back(i);
  int R = int(rest.size());
  Eigen::MatrixXcd Hr(R, R);
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < R; ++j) Hr(i, j) = H(rest[i], rest[j]);
  Eigen::MatrixXcd G = (lam * Eigen::MatrixXcd::Identity(R, R) - Hr).inverse();
  auto el = [&](int r, int c) {
    cplx s = 0.0;
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < R; ++j) s += H(r + M, rest[i]) * G(i, j) * H(rest[j], c + M);
    return s;
  };
  return {el(p, p), el(q, q), el(p, q) + H(p + M, q + M), el(q, p) + H(q + M, p + M)};
}

}  // namespace

TEST_CASE("A series matches the Schur complement") {
  MathieuPotential pot{1.0, 2.0};
  for (int n : {1, 3, 6})
    for (double t : {0.0, 0.01}) {
      cplx lam = std::pow(kTwoPi * n, 2) + 0.3;
      auto S = schur(pot, n, -n, lam, t, 40);
      auto A = A_series(pot, n, lam, t);
      auto Ap = A_series(pot, n, lam, t, 9, SeriesFamily::Periodic, true);
      CHECK(std::abs(A.value - S[0]) <= 1e-14);
      CHECK(std::abs(Ap.value - S[1]) <= 1e-14);
      CHECK(A.tail_bound <= 1e-20);
      CHECK(A.decreasing);
    }
}

TEST_CASE("antiperiodic A series matches the Schur complement") {
  MathieuPotential pot{cplx(0.5, 0.5), 1.5};
  for (int n : {1, 4}) {
    double t = kPi - 0.01;
    cplx lam = std::pow(kTwoPi * n + kPi, 2) + 0.2;
    auto S = schur(pot, n, -n - 1, lam, t, 40);
    auto A = A_series(pot, n, lam, t, 9, SeriesFamily::Antiperiodic);
    CHECK(std::abs(A.value - S[0]) <= 1e-13);
  }
}

TEST_CASE("leading B term is within the modeled tail of the exact coupling") {
  MathieuPotential pot{1.0, 2.0};
  for (int n : {1, 3, 6}) {
    cplx lam = std::pow(kTwoPi * n, 2) + 0.3;
    auto S = schur(pot, n, -n, lam, 0.0, 40);
    cplx B = b_series_leading(pot, n, lam, 0.0).value.value();
    cplx Bp = b_series_leading(pot, n, lam, 0.0, SeriesFamily::Periodic, true).value.value();
    CHECK(std::abs(B / S[2] - 1.0) <= 10.0 / (n * n));
    CHECK(std::abs(Bp / S[3] - 1.0) <= 10.0 / (n * n));
  }
}

TEST_CASE("leading B at the unperturbed eigenvalue is beta_n") {
  for (cplx b : {cplx(1.0), cplx(1.0, 1.0)})
    for (int n = 1; n <= 10; ++n) {
      MathieuPotential pot{1.0, b};
      auto L = b_series_leading(pot, n, std::pow(kTwoPi * n, 2), 0.0);
      auto c = asymptotic_constants(pot, n);
      CHECK(std::abs(L.value.log_magnitude - c.beta_n.log_magnitude) <= 1e-12);
      CHECK(std::abs(wrap_phase(L.value.phase - c.beta_n.phase)) <= 1e-12);
      CHECK(L.order == 2 * n - 1);
    }
}

TEST_CASE("resonant sites") {
  CHECK(resonant_sites(3, SeriesFamily::Periodic).p == 3);
  CHECK(resonant_sites(3, SeriesFamily::Periodic).q == -3);
  CHECK(resonant_sites(3, SeriesFamily::Antiperiodic).q == -4);
}

TEST_CASE("D term: E+ E- equals the product of couplings") {
  auto d = D_of({1.0, 1.0}, 4, std::pow(kTwoPi * 4, 2), 0.0);
  CHECK(d.product_defect <= 1e-10);
  CHECK(d.b_tail_factor == doctest::Approx(10.0 / 16.0));
}

TEST_CASE("predicted degeneracy for (1,-1)") {
  auto pd = predict_double({1.0, -1.0}, 1, SeriesFamily::Antiperiodic);
  CHECK(pd.real_predicted);
  CHECK(pd.t_pred.magnitude() == doctest::Approx(8.51e-6).epsilon(5e-3));
  REQUIRE(pd.sensitivity.size() == 3);
  CHECK(pd.sensitivity[0].c == 0.0);
  CHECK(std::isfinite(pd.sensitivity[0].t_pred));
  CHECK(std::isnan(pd.sensitivity[2].t_pred));

  auto n2 = predict_double({1.0, -1.0}, 2, SeriesFamily::Antiperiodic);
  CHECK(n2.t_pred.magnitude() < 1e-10);
  CHECK_FALSE(predict_double({1.0, -1.0}, 1, SeriesFamily::Periodic).real_predicted);
  CHECK_FALSE(predict_double({1.0, 1.0}, 3, SeriesFamily::Periodic).real_predicted);
  CHECK(predict_double({1.0, -1.0}, 0, SeriesFamily::Antiperiodic).note.find("outside") != std::string::npos);
}

TEST_CASE("asymptotic eigenvalue formula tracks the engine in the series zones") {
  MathieuPotential pot{1.0, 2.0};
  auto rows = compare_with_engine(pot, 6, {0.0, 0.01, kPi - 0.01, kPi});
  CHECK(rows.size() == 8);
  for (const auto& r : rows) CHECK(r.rel_err <= 1e-12);
  for (int n : {1, 3})
    for (const auto& r : compare_with_engine({1.0, -1.0}, n, {0.001, 0.02, kPi - 0.02})) CHECK(r.rel_err <= 1e-10);
}

TEST_CASE("comparison CSV header") {
  auto csv = comparison_csv(compare_with_engine({1.0, 2.0}, 2, {0.0}));
  CHECK(csv.rfind("n,t,formula_value,engine_value,abs_err,rel_err,branch\n", 0) == 0);
}
