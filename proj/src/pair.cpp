#include "mathieu/pair.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>

namespace mh {

namespace bmp = boost::multiprecision;

PairSites sites_for_label(int n, double t_abs) {
  if (t_abs <= 0.5 * kPi) {
    if (n > 0) return {n, -n, +1};
    if (n < 0) return {-n, n, -1};
    return {0, -1, -1};
  }
  if (n >= 0) return {n, -n - 1, -1};
  return {-n - 1, n, +1};
}

int pick_root(const PairResult&, int sign) { return sign > 0 ? 0 : 1; }

int pick_root_near(const PairResult& r, cplx guess) {
  return std::abs(r.lambda[0] - guess) <= std::abs(r.lambda[1] - guess) ? 0 : 1;
}

namespace {

template <class C>
struct Num;

template <>
struct Num<std::complex<double>> {
  using C = std::complex<double>;
  using R = double;
  static constexpr int digits = 16;
  static C from(cplx z) { return z; }
  static cplx to(const C& z) { return z; }
  static double real_d(const R& x) { return x; }
  static R pi() { return kPi; }
};

template <unsigned P>
struct Num<bmp::cpp_complex<P>> {
  using C = bmp::cpp_complex<P>;
  using R = typename bmp::component_type<C>::type;
  static constexpr int digits = int(P);
  static C from(cplx z) { return C(z.real(), z.imag()); }
  static cplx to(const C& z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }
  static double real_d(const R& x) { return static_cast<double>(x); }
  static R pi() { return boost::math::constants::pi<R>(); }
};

template <class C>
struct Reduced {
  C Dp, Dq, Spq, Sqp;
};

template <class C>
struct Chain {
  using N = Num<C>;
  using R = typename N::R;

  int M, p, q;
  C a, b;
  std::vector<C> diag;

  Chain(const MathieuPotential& pot, cplx t, int M_, int p_, int q_) : M(M_), p(p_), q(q_) {
    a = N::from(pot.a);
    b = N::from(pot.b);
    // t/pi in double keeps t = pi exactly on the degenerate lattice
    C tau = N::from(t / kPi);
    R pi = N::pi();
    diag.resize(2 * M + 1);
    for (int k = -M; k <= M; ++k) {
      C w = (C(2 * k) + tau) * C(pi);
      diag[k + M] = w * w;
    }
  }

  const C& d(int k) const { return diag[k + M]; }

  Reduced<C> reduce(const C& lam) const {
    Reduced<C> r;
    C ab = a * b;
    // left tail k < q: ratio c_k / c_{k+1}
    C g(0);
    for (int k = -M; k < q; ++k) g = -a / (d(k) - lam + b * g);
    C sigma_q = b * g;
    C h(0);
    for (int k = M; k > p; --k) h = -b / (d(k) - lam + a * h);
    C sigma_p = a * h;

    int m = p - q - 1;
    if (m == 0) {
      r.Dq = d(q) + sigma_q;
      r.Dp = d(p) + sigma_p;
      r.Sqp = a;
      r.Spq = b;
      return r;
    }
    // [T^-1]_{11} by backward continued fraction, [T^-1]_{mm} and det T by forward pivots
    C t11(0);
    for (int k = p - 1; k > q; --k) t11 = C(1) / (d(k) - lam - ab * t11);
    C piv(0), det(1), tmm(0);
    for (int k = q + 1; k < p; ++k) {
      piv = (k == q + 1) ? (d(k) - lam) : (d(k) - lam - ab / piv);
      det *= piv;
    }
    tmm = C(1) / piv;
    C apow(1), bpow(1);
    for (int i = 0; i < m + 1; ++i) {
      apow *= a;
      bpow *= b;
    }
    C sgn = (m % 2 == 0) ? C(1) : C(-1);
    r.Dq = d(q) + sigma_q - ab * t11;
    r.Dp = d(p) + sigma_p - ab * tmm;
    r.Sqp = sgn * apow / det;
    r.Spq = sgn * bpow / det;
    return r;
  }

  static C psqrt(const C& z) {
    using std::sqrt;
    return sqrt(z);
  }

  C g_of(const C& lam) const {
    Reduced<C> r = reduce(lam);
    return (r.Dp - lam) * (r.Dq - lam) - r.Spq * r.Sqp;
  }

  // unit eigenvector for super-diagonal `sup`, sub-diagonal `sub`, with (x_p, x_q) given
  std::vector<C> fill(const C& lam, const C& sup, const C& sub, const C& xp, const C& xq) const {
    using std::abs;
    using std::sqrt;
    std::vector<C> x(2 * M + 1, C(0));
    x[p + M] = xp;
    x[q + M] = xq;
    // left tail
    std::vector<C> g(2 * M + 1, C(0));
    C gg(0);
    for (int k = -M; k < q; ++k) {
      gg = -sup / (d(k) - lam + sub * gg);
      g[k + M] = gg;
    }
    for (int k = q - 1; k >= -M; --k) x[k + M] = g[k + M] * x[k + 1 + M];
    // right tail
    C hh(0);
    std::vector<C> h(2 * M + 1, C(0));
    for (int k = M; k > p; --k) {
      hh = -sub / (d(k) - lam + sup * hh);
      h[k + M] = hh;
    }
    for (int k = p + 1; k <= M; ++k) x[k + M] = h[k + M] * x[k - 1 + M];
    // middle: Thomas solve
    int m = p - q - 1;
    if (m > 0) {
      std::vector<C> cp(m), dp(m);
      for (int i = 0; i < m; ++i) {
        int k = q + 1 + i;
        C rhs(0);
        if (i == 0) rhs -= sub * xq;
        if (i == m - 1) rhs -= sup * xp;
        C diagk = d(k) - lam;
        if (i == 0) {
          cp[i] = sup / diagk;
          dp[i] = rhs / diagk;
        } else {
          C den = diagk - sub * cp[i - 1];
          cp[i] = sup / den;
          dp[i] = (rhs - sub * dp[i - 1]) / den;
        }
      }
      x[q + 1 + m - 1 + M] = dp[m - 1];
      for (int i = m - 2; i >= 0; --i) x[q + 1 + i + M] = dp[i] - cp[i] * x[q + 2 + i + M];
    }
    R nrm(0);
    std::size_t imax = 0;
    R best(-1);
    for (std::size_t i = 0; i < x.size(); ++i) {
      R ai = abs(x[i]);
      nrm += ai * ai;
      if (ai > best) {
        best = ai;
        imax = i;
      }
    }
    nrm = sqrt(nrm);
    if (nrm == 0) return x;
    // gauge: largest component real positive
    C phase = x[imax] / C(abs(x[imax]));
    C scale = C(1) / (phase * C(nrm));
    for (auto& v : x) v *= scale;
    return x;
  }

  R residual(const std::vector<C>& x, const C& lam) const {
    using std::abs;
    using std::sqrt;
    R s(0);
    for (int k = -M; k <= M; ++k) {
      C row = (d(k) - lam) * x[k + M];
      if (k < M) row += a * x[k + 1 + M];
      if (k > -M) row += b * x[k - 1 + M];
      R ar = abs(row);
      s += ar * ar;
    }
    return sqrt(s);
  }
};

struct Outcome {
  PairResult res;
  bool accurate = false;
};

template <class C>
Outcome run(const MathieuPotential& pot, cplx t, int p, int q, int M) {
  using N = Num<C>;
  using R = typename N::R;
  using std::abs;
  using std::sqrt;

  Chain<C> ch(pot, t, M, p, q);
  R eps = pow(R(10), R(-N::digits));
  if constexpr (std::is_same_v<C, std::complex<double>>) eps = 2.2e-16;

  std::array<C, 2> lam;
  Reduced<C> red;
  bool structural_zero = (pot.a == 0.0 || pot.b == 0.0);

  if (structural_zero) {
    // off-diagonal coupling vanishes on one side: Dp, Dq are the bare diagonal entries
    red = ch.reduce(ch.d(p));
    lam = {ch.d(p), ch.d(q)};
  } else {
    // settle the pair centre first, then split it
    C lam0 = (ch.d(p) + ch.d(q)) / C(2);
    for (int it = 0; it < 40; ++it) {
      red = ch.reduce(lam0);
      C next = (red.Dp + red.Dq) / C(2);
      bool done = abs(next - lam0) <= R(16) * eps * (abs(lam0) + R(1));
      lam0 = next;
      if (done) break;
    }
    red = ch.reduce(lam0);
    C mid = (red.Dp + red.Dq) / C(2);
    C half = (red.Dp - red.Dq) / C(2);
    C sq = Chain<C>::psqrt(half * half + red.Spq * red.Sqp);
    lam = {mid + sq, mid - sq};
    // frozen-coefficient fixed point per root
    for (int it = 0; it < 12; ++it) {
      for (int j = 0; j < 2; ++j) {
        Reduced<C> rj = ch.reduce(lam[j]);
        C mj = (rj.Dp + rj.Dq) / C(2);
        C hj = (rj.Dp - rj.Dq) / C(2);
        C sj = Chain<C>::psqrt(hj * hj + rj.Spq * rj.Sqp);
        C c1 = mj + sj, c2 = mj - sj;
        lam[j] = abs(c1 - lam[j]) <= abs(c2 - lam[j]) ? c1 : c2;
      }
    }
    // simultaneous (Weierstrass) polish of both roots
    R scale = abs(lam[0]) + R(1);
    for (int it = 0; it < 600; ++it) {
      C sep = lam[0] - lam[1];
      if (abs(sep) <= eps * scale) break;
      C s0 = ch.g_of(lam[0]) / sep;
      C s1 = ch.g_of(lam[1]) / (-sep);
      lam[0] -= s0;
      lam[1] -= s1;
      if (abs(s0) + abs(s1) <= R(4) * eps * scale) break;
    }
  }

  // order: [0] is the plus root (larger real part, ties by imaginary part)
  {
    C diff = lam[0] - lam[1];
    R dr = diff.real();
    R di = diff.imag();
    if (dr < 0 || (dr == 0 && di < 0)) std::swap(lam[0], lam[1]);
  }

  Outcome out;
  PairResult& r = out.res;
  r.M = M;
  r.p = p;
  r.q = q;
  r.digits = N::digits;
  C mid = (lam[0] + lam[1]) / C(2);
  C hd = (lam[0] - lam[1]) / C(2);
  Reduced<C> rm = ch.reduce(mid);
  r.mid = N::to(mid);
  r.half = N::to((rm.Dp - rm.Dq) / C(2));
  r.disc = N::to(hd * hd);

  for (int j = 0; j < 2; ++j) {
    Reduced<C> rj = ch.reduce(lam[j]);
    // right null vector of [[Dp-l, Spq], [Sqp, Dq-l]] in (p, q) order
    C r1p = rj.Spq, r1q = lam[j] - rj.Dp;
    C r2p = lam[j] - rj.Dq, r2q = rj.Sqp;
    bool use1 = abs(r1p) + abs(r1q) >= abs(r2p) + abs(r2q);
    C xp = use1 ? r1p : r2p, xq = use1 ? r1q : r2q;
    std::vector<C> right = ch.fill(lam[j], ch.a, ch.b, xp, xq);

    // left null vector: transpose of the reduced matrix
    C l1p = rj.Sqp, l1q = lam[j] - rj.Dp;
    C l2p = lam[j] - rj.Dq, l2q = rj.Spq;
    bool luse1 = abs(l1p) + abs(l1q) >= abs(l2p) + abs(l2q);
    C yp = luse1 ? l1p : l2p, yq = luse1 ? l1q : l2q;
    std::vector<C> left = ch.fill(lam[j], ch.b, ch.a, yp, yq);

    C dot(0);
    for (std::size_t i = 0; i < right.size(); ++i) dot += left[i] * right[i];

    r.lambda[j] = N::to(lam[j]);
    r.d[j] = N::to(dot);
    r.residual[j] = N::real_d(ch.residual(right, lam[j]));
    r.right[j].resize(right.size());
    r.left[j].resize(left.size());
    for (std::size_t i = 0; i < right.size(); ++i) {
      r.right[j][i] = N::to(right[i]);
      r.left[j][i] = N::to(left[i]);
    }
  }

  if (structural_zero) {
    out.accurate = true;
  } else {
    // the pair splitting must stand well above the rounding floor of the reduction
    R loc = abs(mid) + R(1);
    R need = R(1e8) * eps * loc * (abs(rm.Dp - rm.Dq) / R(2) + sqrt(eps) * loc);
    out.accurate = abs(hd * hd) >= need;
  }
  return out;
}

}  // namespace

PairResult solve_pair(const MathieuPotential& pot, cplx t, int p, int q, int M, int min_digits) {
  if (p <= q) throw ValidationError("solve_pair requires p > q");
  if (p > M || q < -M) throw ValidationError("solve_pair: sites outside truncation");
  Outcome o;
  if (min_digits <= 16) {
    o = run<std::complex<double>>(pot, t, p, q, M);
    if (o.accurate) return o.res;
  }
  if (min_digits <= 50) {
    o = run<bmp::cpp_complex<50>>(pot, t, p, q, M);
    if (o.accurate) return o.res;
  }
  if (min_digits <= 100) {
    o = run<bmp::cpp_complex<100>>(pot, t, p, q, M);
    if (o.accurate) return o.res;
  }
  o = run<bmp::cpp_complex<200>>(pot, t, p, q, M);
  o.res.near_double = !o.accurate;
  return o.res;
}

}  // namespace mh
