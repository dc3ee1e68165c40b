#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mathieu/pair.hpp"
#include "mathieu/potential.hpp"

namespace mh {

// Row k: (2 pi k + t)^2 c_k + a c_{k+1} + b c_{k-1}, k = -M..M
struct TruncatedOperator {
  double t = 0.0;
  int M = 0;
  std::vector<double> diag;
  cplx super = 0.0;
  cplx sub = 0.0;

  int dim() const { return 2 * M + 1; }
  double scale() const;
  Eigen::MatrixXcd dense() const;
};

double diag_entry(int k, double t);
int default_truncation(int n_max);

TruncatedOperator assemble(const MathieuPotential& pot, double t, int M);

struct EigenSolution {
  int M = 0;
  double t = 0.0;
  double scale = 0.0;
  std::vector<cplx> lambdas;
  std::vector<std::vector<cplx>> vectors;  // index k + M
  std::vector<double> residuals;
  std::vector<bool> deficiency_flags;
  std::vector<int> cluster_size;
  std::vector<int> cluster_nullity;  // numerical rank deficiency of A - lambda I
};

EigenSolution eig(const TruncatedOperator& op);
EigenSolution eig(const TruncatedOperator& op, const MathieuPotential& pot);
EigenSolution adjoint_solution(const MathieuPotential& pot, double t, int M);
// M grows until eigenvalues with |lambda| <= (2 pi n_max)^2 move less than 1e-9 (1 + |lambda|)
EigenSolution eig_adaptive(const MathieuPotential& pot, double t, int n_max, int* M_used = nullptr);

enum class Family { Periodic, Antiperiodic };
std::string to_string(Family f);

struct BlochFunction {
  int n = 0;
  double t = 0.0;
  int M = 0;
  Family family = Family::Periodic;
  cplx lambda = 0.0;
  std::vector<cplx> coeffs;  // index k + M
  cplx u = 0.0;
  cplx v = 0.0;
  double tail_norm = 0.0;

  cplx coeff(int k) const { return (k < -M || k > M) ? cplx(0.0) : coeffs[k + M]; }
};

struct BlochPair {
  BlochFunction psi;
  BlochFunction psi_star;
  cplx d = 0.0;  // (Psi, Psi*)
  double residual = 0.0;
  int digits = 16;
  bool near_double = false;
};

// Eigenpair carrying label n at quasimomentum t; `guess` overrides the branch rule.
BlochPair bloch_function(const MathieuPotential& pot, double t, int n, Family family, int M = 0,
                         std::optional<cplx> guess = std::nullopt);

// Both roots of the (p, q) reduction at t (t >= 0), for callers needing the partner too.
PairResult band_pair(const MathieuPotential& pot, double t_abs, int n, int M);

struct PairLabel {
  int n = 0;
  std::string zone;  // "0" or "pi"
  int first = 0;     // label carried by lambda_{n,1}
  int second = 0;    // label carried by lambda_{n,2}
};

struct BlochCurveSet {
  std::vector<double> t_grid;
  std::map<int, std::vector<cplx>> curves;
  std::map<int, std::vector<double>> residuals;
  std::vector<PairLabel> pair_labels;
  std::vector<std::string> ambiguities;
};

BlochCurveSet track_curves(const MathieuPotential& pot, const std::vector<double>& t_grid, int n_lo, int n_hi,
                           int M = 0);

constexpr double kRho = 1.0 / (16.0 * kPi);

}  // namespace mh
