#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mathieu/floquet.hpp"
#include "mathieu/potential.hpp"
#include "mathieu/spectrality.hpp"

namespace mh {

// f^(xi) = int f(x) e^{-i xi x} dx
struct TestFunction {
  enum class Kind { Gaussian, Modulated, Bump };
  Kind kind = Kind::Gaussian;
  double center = 0.0;
  double width = 0.5;      // gaussian standard deviation
  double frequency = 0.0;  // modulated: f = gaussian * e^{i frequency x}
  double support = 1.0;    // bump: cos^2(pi (x - center) / (2 support)) on |x - center| < support

  static TestFunction gaussian(double center, double width);
  static TestFunction modulated(double center, double width, double frequency);
  static TestFunction bump(double center, double support);

  cplx operator()(double x) const;
  cplx transform(double xi) const;
  double sup_norm() const;
  double l2_norm_sq() const;
  std::string describe() const;
};

TestFunction parse_test_function(const std::string& spec);

// int f conj(Psi*) dx / (Psi, Psi*), with both inner products taken from the coefficient vectors
cplx bloch_coefficient(const BlochPair& bp, const TestFunction& f);
cplx bloch_coefficient(const MathieuPotential& pot, const TestFunction& f, int n, double t);
cplx evaluate_bloch(const BlochFunction& psi, double x);

struct ExpansionPlan {
  ExpansionForm form = ExpansionForm::Elegant;
  int n_max = 10;
  double h = 0.02;
  std::vector<int> S_set;
  bool detect_S = false;  // fill S_set from detect_singularities over the window covered by n_max
  int gl_order = 10;
  int dyadic_levels = 24;
};

struct PointResidual {
  double x = 0.0;
  cplx f = 0.0;
  cplx reconstruction = 0.0;
  double residual = 0.0;  // |reconstruction - f| / sup |f|
};

struct ResidualReport {
  ExpansionForm form = ExpansionForm::Elegant;
  int n_max = 0;
  std::optional<double> h;
  std::vector<int> S_set;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double quadrature_delta = 0.0;  // change against the lower-order rule, relative to sup |f|
  long t_nodes = 0;
  std::vector<PointResidual> per_point;
  // paired form: int_{delta}^{h} |a_1 Psi_1(x_0)| dt for shrinking delta
  std::vector<std::pair<double, double>> single_term_trace;
  std::vector<std::string> notes;
};

ResidualReport reconstruct(const MathieuPotential& pot, const TestFunction& f, const ExpansionPlan& plan,
                           const std::vector<double>& eval_points);

std::vector<double> default_eval_points(const TestFunction& f, int count = 9);

// sum_n int |a_n(t)|^2 dt / (2 pi) over |n| <= n_max
double coefficient_energy(const MathieuPotential& pot, const TestFunction& f, int n_max, int gl_order = 10);

// a_n Psi_n + a_partner Psi_partner at x, sampled at one t
cplx pair_integrand(const MathieuPotential& pot, const TestFunction& f, int n, int partner, double t, double x);
cplx single_integrand(const MathieuPotential& pot, const TestFunction& f, int n, double t, double x);

}  // namespace mh
