#pragma once

#include <array>
#include <string>
#include <vector>

#include "mathieu/potential.hpp"

namespace mh {

enum class SeriesFamily { Periodic, Antiperiodic };
std::string to_string(SeriesFamily f);

// resonant Fourier sites of band n: (n, -n) near t = 0, (n, -n-1) near t = pi
struct ResonantSites {
  int p = 0;
  int q = 0;
};
ResonantSites resonant_sites(int n, SeriesFamily family);

struct SeriesValue {
  cplx value = 0.0;
  int k_max = 0;
  double tail_bound = 0.0;
  std::vector<cplx> terms;  // terms[k-1] = k-th order contribution
  bool decreasing = true;   // |term_k| decreasing beyond the first nonzero term
};

struct LeadingB {
  LogComplex value;
  int order = 0;  // k = p - q - 1
};

// exact finite product b^{p-q} / prod (lambda - diag(site)) over the sites strictly between q and p;
// the primed variant uses a^{p-q}
LeadingB b_series_leading(const MathieuPotential& pot, int n, cplx lambda, double t,
                          SeriesFamily family = SeriesFamily::Periodic, bool primed = false);

// sum over +-1 index paths that never revisit the resonant sites, up to order k_max
SeriesValue A_series(const MathieuPotential& pot, int n, cplx lambda, double t, int k_max = 9,
                     SeriesFamily family = SeriesFamily::Periodic, bool primed = false);

constexpr double kSeriesZone = 1.0 / (15.0 * kPi);

struct DTerm {
  cplx d_value = 0.0;
  cplx c_value = 0.0;
  cplx a_value = 0.0, a_prime_value = 0.0;
  LogComplex b_value, b_prime_value;
  double b_tail_factor = 0.0;  // modeled bound 10 n^-2 on the multiplicative tail of B, B'
  cplx shift = 0.0;            // 4 pi n t (periodic) or 2 pi (2n+1)(t - pi)
  std::array<cplx, 2> e_minus;  // [0]: s = -1, [1]: s = +1
  std::array<cplx, 2> e_plus;
  int s_branch = 1;             // branch satisfied by lambda
  double product_defect = 0.0;  // |E+ E- / (alpha beta) - 1|
};

DTerm D_of(const MathieuPotential& pot, int n, cplx lambda, double t, SeriesFamily family = SeriesFamily::Periodic);

struct DegeneracySensitivity {
  double c = 0.0;
  bool real_predicted = false;
  double t_pred = 0.0;  // NaN when the c-model is degenerate
};

struct PredictedDegeneracy {
  int n = 0;
  SeriesFamily family = SeriesFamily::Periodic;
  LogComplex product;  // beta alpha (tilde for antiperiodic)
  double product_phase = 0.0;
  bool real_predicted = false;
  LogComplex t_pred;  // offset from 0 (periodic) or from pi (antiperiodic)
  std::vector<DegeneracySensitivity> sensitivity;
  std::string note;
};

PredictedDegeneracy predict_double(const MathieuPotential& pot, int n, SeriesFamily family);

// branch j in {1, 2}; zone chosen from t
cplx asymptotic_lambda(const MathieuPotential& pot, int n, double t, int j);

struct ComparisonRow {
  int n = 0;
  double t = 0.0;
  cplx formula = 0.0;
  cplx engine = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  int branch = 0;
};

std::vector<ComparisonRow> compare_with_engine(const MathieuPotential& pot, int n, const std::vector<double>& t_grid);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace mh
