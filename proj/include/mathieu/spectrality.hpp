#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mathieu/discriminant.hpp"
#include "mathieu/floquet.hpp"
#include "mathieu/potential.hpp"

namespace mh {

enum class DnMethod { Eigenvector, Wronskian };
std::string to_string(DnMethod m);

struct DnSample {
  double t = 0.0;
  double abs_d = 0.0;
  DnMethod method = DnMethod::Eigenvector;
  std::optional<double> cross;  // Wronskian value when that method resolved the sample
  double cross_rel_error = NAN;
  bool mutually_valid = false;
};

struct ProjectionProfile {
  int n = 0;
  std::vector<DnSample> samples;
  double sup_inverse = 0.0;
  std::vector<double> excluded;
  double both_fraction = 0.0;     // share of grid points carrying both methods
  double max_disagreement = 0.0;  // over mutually valid samples
};

constexpr double kWronskianValidity = 1e-3;

// wronskian_stride = 0 disables the cross-check
ProjectionProfile dn_profile(const MathieuPotential& pot, int n, const std::vector<double>& t_grid,
                             int wronskian_stride = 1);

// |d_n(t)| from the eigenvector pair; throws NonconvergenceError at multiple eigenvalues
double abs_dn(const MathieuPotential& pot, int n, double t);

// real t in (-pi, pi] at which band n meets its resonant partner
std::vector<double> degeneracy_points(const MathieuPotential& pot, int n);

struct InverseDnIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
  bool divergence_flag = false;
  std::vector<double> excluded;
  std::vector<std::pair<double, double>> trace;  // (epsilon_k, v(epsilon_k))
  double growth_per_decade = 1.0;                // geometric mean of v(eps_k+1)/v(eps_k)
};

InverseDnIntegral integral_inverse_dn(const MathieuPotential& pot, int n, double lo, double hi,
                                      double epsilon_floor = 1e-6);

struct EssEvidence {
  CriticalPoint point;
  int label = 0;
  int algebraic_multiplicity = 0;
  int geometric_multiplicity = 0;
  InverseDnIntegral divergence;
  bool confirmed = false;
};

struct SingularityScan {
  std::vector<CriticalPoint> singularities;
  std::vector<EssEvidence> ess;         // geometric multiplicity 1 and divergence flagged
  std::vector<EssEvidence> borderline;  // multiple with a single eigenvector, divergence not resolved
  std::vector<std::string> notes;
};

SingularityScan detect_singularities(const MathieuPotential& pot, const Window& window);

struct TInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(hi > lo); }
};

struct RegionDecomposition {
  int n = 0;
  double epsilon_n = 0.0;
  double beta_abs = 0.0;
  TInterval I1, I2, I3, I4, I5;
  std::vector<std::string> notices;
};

RegionDecomposition region_decomposition(const MathieuPotential& pot, int n);

enum class ExpansionForm { Elegant, AsymptoticallyElegant, Gasymov };
std::string to_string(ExpansionForm f);
ExpansionForm expansion_form_of(const MathieuPotential& pot);

using AlphaInput = std::variant<std::monostate, Rational, double>;

struct ClassifyOptions {
  bool scan_singularities = true;
  double window_hi = 250.0;
  int ess_infinity_nmax = 4;  // 0 skips the integral diagnostic
};

struct SpectralityReport {
  MathieuPotential pot;
  bool modulus_equal = false;
  std::optional<DiophantineVerdict> diophantine;
  TriState asymptotically_spectral = TriState::Undecided;
  std::vector<CriticalPoint> singularities;
  std::vector<EssEvidence> ess;
  std::vector<EssEvidence> ess_borderline;
  TriState ess_at_infinity = TriState::Undecided;
  std::vector<std::pair<int, InverseDnIntegral>> infinity_evidence;
  ExpansionForm expansion_form = ExpansionForm::Elegant;
  std::vector<std::string> notes;
};

SpectralityReport classify_operator(const MathieuPotential& pot, const AlphaInput& alpha = {},
                                    const ClassifyOptions& opt = {});

}  // namespace mh
