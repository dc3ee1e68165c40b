#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mathieu/potential.hpp"

namespace mh {

enum class OdeLevel { Values, FirstDerivative, SecondDerivative };

struct FundamentalData {
  cplx lambda = 0.0;
  cplx theta1 = 0.0, dtheta1 = 0.0, phi1 = 0.0, dphi1 = 0.0;
  // d/dlambda and d^2/dlambda^2 of the boundary values (zero when not requested)
  cplx theta1_l = 0.0, dtheta1_l = 0.0, phi1_l = 0.0, dphi1_l = 0.0;
  cplx theta1_ll = 0.0, dtheta1_ll = 0.0, phi1_ll = 0.0, dphi1_ll = 0.0;
  // Gram entries on [0,1]: int |theta|^2, int |phi|^2, int theta conj(phi)
  double g_tt = 0.0, g_pp = 0.0;
  cplx g_tp = 0.0;
  double est_error = 0.0;
  long steps = 0;

  cplx wronskian() const { return theta1 * dphi1 - dtheta1 * phi1; }
  cplx F() const { return theta1 + dphi1; }
  cplx dF() const { return theta1_l + dphi1_l; }
  cplx d2F() const { return theta1_ll + dphi1_ll; }
};

FundamentalData fundamental_solutions(const MathieuPotential& pot, cplx lambda,
                                      OdeLevel level = OdeLevel::Values, bool gram = false);

cplx discriminant(const MathieuPotential& pot, cplx lambda);
cplx discriminant_derivative(const MathieuPotential& pot, cplx lambda);

struct Window {
  double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
  bool contains(cplx z) const {
    return z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo && z.imag() <= im_hi;
  }
};

// real interval [lo, hi] widened to a rectangle around the real axis
Window window_around(double lo, double hi, const MathieuPotential& pot);

struct DiscriminantRoot {
  cplx lambda = 0.0;
  cplx seed = 0.0;
  double residual = 0.0;  // |F(lambda) - 2 cos t|
  cplx dF = 0.0;
  bool double_root = false;
};

struct RootScan {
  std::vector<DiscriminantRoot> roots;
  std::vector<cplx> diverged_seeds;
};

RootScan eigenvalues_at(const MathieuPotential& pot, double t, const Window& window,
                        std::optional<std::vector<cplx>> seeds = std::nullopt);

enum class CriticalFamily { Periodic, Antiperiodic, Interior };
std::string to_string(CriticalFamily f);

struct CriticalPoint {
  cplx lambda_star = 0.0;
  cplx t_star = 0.0;
  cplx F = 0.0;
  cplx d2F = 0.0;
  cplx tau_sq = 0.0;  // (t* - anchor)^2, anchor 0 or pi by parity of round(sqrt(lambda*)/pi)
  bool t_real = false;
  bool is_two_periodic = false;
  CriticalFamily family = CriticalFamily::Interior;
  int n_guess = 0;
  bool refined = false;  // t_star from the extended-precision pair reduction
};

// tau^2 = (t - anchor)^2 at which the (n, -n) [anti: (n, -n-1)] pair coalesces; anchor 0 or pi
std::optional<cplx> degeneracy_tau_sq(const MathieuPotential& pot, int n, bool antiperiodic, cplx guess = 0.0);

// winding number of F' around the rectangle boundary
int count_critical_points(const MathieuPotential& pot, const Window& w);
std::vector<CriticalPoint> find_critical_points(const MathieuPotential& pot, const Window& window);

struct WronskianDn {
  double abs_d = 0.0;
  bool used_g_form = false;
  cplx dF = 0.0;
  // looser-tolerance change plus the response to the root shift an O(1e-13) error in F implies
  double rel_error = 0.0;
};

double dn_via_wronskian(const MathieuPotential& pot, int n, double t, cplx lambda_n);
WronskianDn dn_via_wronskian_detail(const MathieuPotential& pot, double t, cplx lambda_n);

}  // namespace mh
