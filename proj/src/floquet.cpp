#include "mathieu/floquet.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mh {

double diag_entry(int k, double t) {
  double w = kPi * (2.0 * k + t / kPi);
  return w * w;
}

int default_truncation(int n_max) { return std::max(2 * n_max + 16, 32); }

double TruncatedOperator::scale() const {
  double m = 0.0;
  for (double d : diag) m = std::max(m, std::abs(d));
  return m + std::abs(super) + std::abs(sub);
}

Eigen::MatrixXcd TruncatedOperator::dense() const {
  int n = dim();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = diag[i];
    if (i + 1 < n) A(i, i + 1) = super;
    if (i > 0) A(i, i - 1) = sub;
  }
  return A;
}

TruncatedOperator assemble(const MathieuPotential& pot, double t, int M) {
  if (M < 4) throw ValidationError("assemble: M must be >= 4");
  TruncatedOperator op;
  op.t = t;
  op.M = M;
  op.super = pot.a;
  op.sub = pot.b;
  op.diag.resize(2 * M + 1);
  for (int k = -M; k <= M; ++k) op.diag[k + M] = diag_entry(k, t);
  return op;
}

std::string to_string(Family f) { return f == Family::Periodic ? "periodic" : "antiperiodic"; }

namespace {

double residual_of(const Eigen::MatrixXcd& A, cplx lam, const std::vector<cplx>& v) {
  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(v.data(), v.size());
  return (A * x - lam * x).norm();
}

// dim ker(A - lambda I): rank >= dim - 1 as soon as one off-diagonal is nonzero
int nullity(const MathieuPotential& pot, int mult) { return pot.is_free() ? mult : 1; }

// two sites whose diagonal entries lie closest to mu, ordered p > q
std::pair<int, int> closest_sites(const TruncatedOperator& op, cplx mu) {
  std::vector<int> idx(op.dim());
  std::iota(idx.begin(), idx.end(), -op.M);
  std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](int x, int y) {
    double dx = std::abs(op.diag[x + op.M] - mu), dy = std::abs(op.diag[y + op.M] - mu);
    return dx < dy || (dx == dy && x < y);
  });
  return {std::max(idx[0], idx[1]), std::min(idx[0], idx[1])};
}

EigenSolution triangular_eig(const TruncatedOperator& op, const MathieuPotential& pot) {
  EigenSolution s;
  s.M = op.M;
  s.t = op.t;
  s.scale = op.scale();
  Eigen::MatrixXcd A = op.dense();
  int n = op.dim();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return op.diag[x] < op.diag[y]; });
  for (int i : order) {
    int k = i - op.M;
    cplx lam = op.diag[i];
    int mult = 0;
    for (double d : op.diag)
      if (d == op.diag[i]) ++mult;
    std::vector<cplx> v(n, 0.0);
    if (pot.is_free()) {
      v[i] = 1.0;
    } else {
      // partner: a duplicate diagonal entry when present, otherwise the nearest site
      int partner = k == op.M ? k - 1 : k + 1;
      double best = INFINITY;
      for (int j = -op.M; j <= op.M; ++j) {
        if (j == k) continue;
        double dd = std::abs(op.diag[j + op.M] - op.diag[i]);
        if (dd < best) {
          best = dd;
          partner = j;
        }
      }
      int p = std::max(k, partner), q = std::min(k, partner);
      PairResult pr = solve_pair(pot, op.t, p, q, op.M);
      int j = (std::abs(pr.lambda[0] - lam) <= std::abs(pr.lambda[1] - lam)) ? 0 : 1;
      v = pr.right[j];
    }
    s.lambdas.push_back(lam);
    s.vectors.push_back(v);
    s.residuals.push_back(residual_of(A, lam, v));
    s.cluster_size.push_back(mult);
    s.cluster_nullity.push_back(nullity(pot, mult));
    s.deficiency_flags.push_back(mult > 1 && !pot.is_free());
  }
  return s;
}

}  // namespace

EigenSolution eig(const TruncatedOperator& op) { return eig(op, MathieuPotential{op.super, op.sub}); }

EigenSolution eig(const TruncatedOperator& op, const MathieuPotential& pot) {
  if (pot.triangular()) return triangular_eig(op, pot);

  Eigen::MatrixXcd A = op.dense();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, true);
  if (es.info() != Eigen::Success) throw NonconvergenceError("eig: QR iteration did not converge");

  int n = op.dim();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto ev = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (ev(x).real() != ev(y).real()) return ev(x).real() < ev(y).real();
    return ev(x).imag() < ev(y).imag();
  });

  EigenSolution s;
  s.M = op.M;
  s.t = op.t;
  s.scale = op.scale();
  for (int i : order) {
    s.lambdas.push_back(ev(i));
    std::vector<cplx> v(n);
    Eigen::VectorXcd col = es.eigenvectors().col(i).normalized();
    for (int r = 0; r < n; ++r) v[r] = col(r);
    s.vectors.push_back(v);
  }
  s.residuals.assign(n, 0.0);
  s.deficiency_flags.assign(n, false);
  s.cluster_size.assign(n, 1);
  s.cluster_nullity.assign(n, 1);

  double thr = 1e-7 * s.scale;
  std::vector<bool> seen(n, false);
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<int> cl{i};
    for (int j = i + 1; j < n; ++j)
      if (!seen[j] && std::abs(s.lambdas[j] - s.lambdas[i]) < thr) cl.push_back(j);
    for (int j : cl) seen[j] = true;
    if (cl.size() == 1) continue;
    cplx mu = 0.0;
    for (int j : cl) mu += s.lambdas[j];
    mu /= double(cl.size());
    int nul = nullity(pot, int(cl.size()));
    for (int j : cl) {
      s.cluster_size[j] = int(cl.size());
      s.cluster_nullity[j] = nul;
    }
    if (cl.size() == 2) {
      auto [p, q] = closest_sites(op, mu);
      PairResult pr = solve_pair(pot, op.t, p, q, op.M);
      for (int r = 0; r < 2; ++r) {
        s.lambdas[cl[r]] = pr.lambda[r];
        s.vectors[cl[r]] = pr.right[r];
        s.deficiency_flags[cl[r]] = pr.near_double;
      }
    } else {
      for (int j : cl) s.deficiency_flags[j] = nul < int(cl.size());
    }
  }
  // restore ordering after refinement
  std::vector<int> ord2(n);
  std::iota(ord2.begin(), ord2.end(), 0);
  std::stable_sort(ord2.begin(), ord2.end(), [&](int x, int y) {
    if (s.lambdas[x].real() != s.lambdas[y].real()) return s.lambdas[x].real() < s.lambdas[y].real();
    return s.lambdas[x].imag() < s.lambdas[y].imag();
  });
  EigenSolution out = s;
  for (int r = 0; r < n; ++r) {
    int i = ord2[r];
    out.lambdas[r] = s.lambdas[i];
    out.vectors[r] = s.vectors[i];
    out.deficiency_flags[r] = s.deficiency_flags[i];
    out.cluster_size[r] = s.cluster_size[i];
    out.cluster_nullity[r] = s.cluster_nullity[i];
    out.residuals[r] = residual_of(A, out.lambdas[r], out.vectors[r]);
  }
  return out;
}

EigenSolution adjoint_solution(const MathieuPotential& pot, double t, int M) {
  MathieuPotential adj = pot.adjoint();
  return eig(assemble(adj, t, M), adj);
}

EigenSolution eig_adaptive(const MathieuPotential& pot, double t, int n_max, int* M_used) {
  int M = default_truncation(n_max);
  double window = std::pow(kTwoPi * std::max(n_max, 1), 2);
  for (int round = 0; round < 6; ++round) {
    EigenSolution s1 = eig(assemble(pot, t, M), pot);
    EigenSolution s2 = eig(assemble(pot, t, M + 10), pot);
    bool ok = true;
    for (cplx l : s1.lambdas) {
      if (std::abs(l) > window) continue;
      double best = INFINITY;
      for (cplx l2 : s2.lambdas) best = std::min(best, std::abs(l - l2));
      if (best >= 1e-9 * (1.0 + std::abs(l))) {
        ok = false;
        break;
      }
    }
    if (ok) {
      if (M_used) *M_used = M;
      return s1;
    }
    M *= 2;
  }
  throw NonconvergenceError("eig_adaptive: truncation did not stabilise");
}

PairResult band_pair(const MathieuPotential& pot, double t_abs, int n, int M) {
  PairSites s = sites_for_label(n, t_abs);
  return solve_pair(pot, t_abs, s.p, s.q, M);
}

BlochPair bloch_function(const MathieuPotential& pot, double t, int n, Family family, int M,
                         std::optional<cplx> guess) {
  if (!(t > -kPi - 1e-15 && t <= kPi + 1e-15)) throw ValidationError("bloch_function: t outside (-pi, pi]");
  if (M == 0) M = std::max(default_truncation(std::abs(n) + 1), std::abs(n) + 20);
  double ta = std::abs(t);
  PairSites s = sites_for_label(n, ta);
  PairResult pr = solve_pair(pot, ta, s.p, s.q, M);
  int j = guess ? pick_root_near(pr, *guess) : pick_root(pr, s.sign);

  BlochPair out;
  out.d = pr.d[j];
  out.residual = pr.residual[j];
  out.digits = pr.digits;
  out.near_double = pr.near_double;
  if (pr.near_double || pr.d[j] == 0.0)
    throw NonconvergenceError("bloch_function: eigenvalue is multiple (n=" + std::to_string(n) +
                              ", t=" + std::to_string(t) + ")");

  const std::vector<cplx>& r = pr.right[j];
  const std::vector<cplx>& l = pr.left[j];
  int dim = 2 * M + 1;
  std::vector<cplx> c(dim), cs(dim);
  for (int k = -M; k <= M; ++k) {
    if (t >= 0) {
      c[k + M] = r[k + M];
      cs[k + M] = std::conj(l[k + M]);
    } else {
      // L_{-t}(a,b) is the k -> -k mirror of the transpose of L_t(a,b)
      c[k + M] = l[-k + M];
      cs[k + M] = std::conj(r[-k + M]);
    }
  }

  auto make = [&](const std::vector<cplx>& v, cplx lam) {
    BlochFunction f;
    f.n = n;
    f.t = t;
    f.M = M;
    f.family = family;
    f.lambda = lam;
    f.coeffs = v;
    int kv = family == Family::Periodic ? -n : -n - 1;
    f.u = f.coeff(n);
    f.v = f.coeff(kv);
    double tail = 0.0;
    for (int k = -M; k <= M; ++k)
      if (k != n && k != kv) tail += std::norm(v[k + M]);
    f.tail_norm = std::sqrt(tail);
    return f;
  };
  out.psi = make(c, pr.lambda[j]);
  out.psi_star = make(cs, std::conj(pr.lambda[j]));
  return out;
}

BlochCurveSet track_curves(const MathieuPotential& pot, const std::vector<double>& t_grid, int n_lo, int n_hi,
                           int M) {
  if (n_lo > n_hi) throw ValidationError("track_curves: empty band range");
  int nmax = std::max(std::abs(n_lo), std::abs(n_hi));
  if (M == 0) M = default_truncation(nmax + 1);

  std::set<double> tabs;
  for (double t : t_grid) {
    if (!(t > -kPi - 1e-15 && t <= kPi + 1e-15)) throw ValidationError("track_curves: t outside (-pi, pi]");
    tabs.insert(std::min(std::abs(t), kPi));
  }
  const double anchor = 0.5 * kPi;
  tabs.insert(anchor);

  std::map<double, EigenSolution> sol;
  for (double t : tabs) sol.emplace(t, eig(assemble(pot, t, M), pot));

  std::vector<int> bands;
  for (int n = n_lo; n <= n_hi; ++n) bands.push_back(n);
  int B = int(bands.size());

  std::map<double, std::vector<int>> pick;  // t -> eigen index per band
  BlochCurveSet out;

  // anchor labelling by nearest unperturbed value
  {
    const EigenSolution& s = sol.at(anchor);
    std::vector<std::tuple<double, int, int>> trip;
    for (int b = 0; b < B; ++b) {
      double target = std::pow(kTwoPi * bands[b] + anchor, 2);
      for (int i = 0; i < int(s.lambdas.size()); ++i) trip.emplace_back(std::abs(s.lambdas[i] - target), b, i);
    }
    std::sort(trip.begin(), trip.end());
    std::vector<int> sel(B, -1);
    std::vector<bool> used(s.lambdas.size(), false);
    for (auto& [dist, b, i] : trip) {
      if (sel[b] >= 0 || used[i]) continue;
      sel[b] = i;
      used[i] = true;
    }
    pick[anchor] = sel;
  }

  auto march = [&](const std::vector<double>& seq) {
    std::vector<std::vector<cplx>> hist(B);
    std::vector<double> thist;
    thist.push_back(anchor);
    for (int b = 0; b < B; ++b) hist[b].push_back(sol.at(anchor).lambdas[pick[anchor][b]]);
    for (double t : seq) {
      const EigenSolution& s = sol.at(t);
      int ne = int(s.lambdas.size());
      std::vector<cplx> pred(B);
      for (int b = 0; b < B; ++b) {
        std::size_t h = hist[b].size();
        if (h >= 2) {
          double t1 = thist[h - 1], t0 = thist[h - 2];
          pred[b] = hist[b][h - 1] + (hist[b][h - 1] - hist[b][h - 2]) * ((t - t1) / (t1 - t0));
        } else {
          pred[b] = hist[b][h - 1];
        }
      }
      std::vector<std::tuple<double, int, int>> trip;
      std::vector<std::vector<std::pair<double, int>>> cand(B);
      for (int b = 0; b < B; ++b) {
        for (int i = 0; i < ne; ++i) cand[b].emplace_back(std::abs(s.lambdas[i] - pred[b]), i);
        std::partial_sort(cand[b].begin(), cand[b].begin() + std::min(4, ne), cand[b].end());
        cand[b].resize(std::min(4, ne));
        for (auto& [dist, i] : cand[b]) trip.emplace_back(dist, b, i);
      }
      std::sort(trip.begin(), trip.end());
      std::vector<int> sel(B, -1);
      std::vector<bool> used(ne, false);
      for (auto& [dist, b, i] : trip) {
        if (sel[b] >= 0 || used[i]) continue;
        sel[b] = i;
        used[i] = true;
      }
      for (int b = 0; b < B; ++b) {
        if (sel[b] < 0) throw NonconvergenceError("track_curves: band lost during continuation");
        // ambiguity: two candidates equally close to the prediction within solver residual
        double tol = std::max(1e-9 * (1.0 + std::abs(pred[b])), 10.0 * s.residuals[sel[b]]);
        double d1 = std::abs(s.lambdas[sel[b]] - pred[b]);
        for (auto& [dist, i] : cand[b]) {
          if (i == sel[b]) continue;
          if (std::abs(s.lambdas[i] - s.lambdas[sel[b]]) > tol && dist - d1 < tol) {
            // resolve with the branch rule of the reduced pair problem
            PairResult pr = band_pair(pot, t, bands[b], M);
            cplx lab = pr.lambda[pick_root(pr, sites_for_label(bands[b], t).sign)];
            int alt = std::abs(s.lambdas[i] - lab) < std::abs(s.lambdas[sel[b]] - lab) ? i : sel[b];
            out.ambiguities.push_back("n=" + std::to_string(bands[b]) + " t=" + std::to_string(t) +
                                      ": candidates " + format_complex(s.lambdas[sel[b]]) + " / " +
                                      format_complex(s.lambdas[i]) + " resolved by branch rule");
            if (alt != sel[b]) {
              for (int b2 = 0; b2 < B; ++b2)
                if (sel[b2] == alt) sel[b2] = sel[b];
              sel[b] = alt;
            }
            break;
          }
        }
      }
      pick[t] = sel;
      thist.push_back(t);
      for (int b = 0; b < B; ++b) hist[b].push_back(s.lambdas[sel[b]]);
    }
  };

  std::vector<double> down, up;
  for (double t : tabs) {
    if (t < anchor) down.push_back(t);
    if (t > anchor) up.push_back(t);
  }
  std::reverse(down.begin(), down.end());
  march(down);
  march(up);

  out.t_grid = t_grid;
  for (int b = 0; b < B; ++b) {
    auto& cv = out.curves[bands[b]];
    auto& rs = out.residuals[bands[b]];
    for (double t : t_grid) {
      double ta = std::min(std::abs(t), kPi);
      const EigenSolution& s = sol.at(ta);
      int i = pick.at(ta)[b];
      cv.push_back(s.lambdas[i]);
      rs.push_back(s.residuals[i]);
    }
  }
  for (int n : bands) {
    if (n > 0) out.pair_labels.push_back({n, "0", -n, n});
    if (n >= 0) out.pair_labels.push_back({n, "pi", n, -(n + 1)});
  }
  return out;
}

}  // namespace mh
