#pragma once

#include <array>
#include <vector>

#include "mathieu/potential.hpp"

namespace mh {

// Two Fourier sites p > q whose diagonal entries nearly coincide, and which
// root of the reduced 2x2 problem carries the label (+1: mid + sqrt, -1: mid - sqrt).
struct PairSites {
  int p = 0;
  int q = -1;
  int sign = -1;
};

PairSites sites_for_label(int n, double t_abs);

// Exact reduction of the tridiagonal eigenproblem onto the sites (p, q):
// roots of (Dp(l) - l)(Dq(l) - l) = Spq(l) Sqp(l).
struct PairResult {
  int M = 0;
  int p = 0, q = -1;
  std::array<cplx, 2> lambda;              // [0] = plus root, [1] = minus root
  std::array<std::vector<cplx>, 2> right;  // unit right eigenvectors, index k + M
  std::array<std::vector<cplx>, 2> left;   // unit left eigenvectors (rows), index k + M
  std::array<cplx, 2> d;                   // left . right
  std::array<double, 2> residual;          // ||(A - l) right||
  cplx mid = 0.0;
  cplx half = 0.0;                         // (Dp - Dq)/2 at mid
  cplx disc = 0.0;                         // ((l+ - l-)/2)^2
  int digits = 16;
  bool near_double = false;                // roots unresolved at the highest precision tier
};

// t may be complex (used when refining degeneracy locations).
PairResult solve_pair(const MathieuPotential& pot, cplx t, int p, int q, int M, int min_digits = 0);

// Index of the root carrying `sign`, or the root nearest `guess` when given.
int pick_root(const PairResult& r, int sign);
int pick_root_near(const PairResult& r, cplx guess);

}  // namespace mh
