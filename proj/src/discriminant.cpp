#include "mathieu/discriminant.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "mathieu/floquet.hpp"
#include "mathieu/pair.hpp"

namespace mh {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

constexpr double kTol = 1e-13;

// complex slot i lives at state[2i], state[2i+1]
struct Layout {
  int solutions = 4;  // theta, theta', phi, phi' per derivative order
  int orders = 1;
  bool gram = false;
  std::vector<std::pair<cplx, cplx>> combos;  // int |A theta + B phi|^2
  int gram_at() const { return solutions * orders; }
  int combo_at() const { return gram_at() + (gram ? 3 : 0); }
  int size() const { return 2 * (combo_at() + int(combos.size())); }
};

cplx get(const State& s, int i) { return {s[2 * i], s[2 * i + 1]}; }
void put(State& s, int i, cplx z) {
  s[2 * i] = z.real();
  s[2 * i + 1] = z.imag();
}

struct Rhs {
  cplx a, b, lambda;
  Layout L;

  void operator()(const State& s, State& ds, double x) const {
    cplx e = std::polar(1.0, kTwoPi * x);
    cplx w = a * std::conj(e) + b * e - lambda;
    for (int o = 0; o < L.orders; ++o) {
      for (int f = 0; f < 2; ++f) {
        int i = 4 * o + 2 * f;
        cplx y = get(s, i), dy = get(s, i + 1);
        cplx src = 0.0;
        if (o > 0) src = -double(o) * get(s, 4 * (o - 1) + 2 * f);
        put(ds, i, dy);
        put(ds, i + 1, w * y + src);
      }
    }
    if (L.gram) {
      cplx th = get(s, 0), ph = get(s, 2);
      int g = L.gram_at();
      put(ds, g, std::norm(th));
      put(ds, g + 1, std::norm(ph));
      put(ds, g + 2, th * std::conj(ph));
    }
    for (std::size_t c = 0; c < L.combos.size(); ++c) {
      cplx v = L.combos[c].first * get(s, 0) + L.combos[c].second * get(s, 2);
      put(ds, L.combo_at() + int(c), std::norm(v));
    }
  }
};

std::string lambda_str(cplx l) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << l.real() << "," << l.imag() << ")";
  return os.str();
}

State integrate(const MathieuPotential& pot, cplx lambda, const Layout& L, double tol, long* steps_out) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) || std::abs(lambda) > 1e8)
    throw ValidationError("fundamental_solutions: |lambda| exceeds 1e8 at lambda=" + lambda_str(lambda));
  State s(L.size(), 0.0);
  put(s, 0, 1.0);  // theta(0)
  put(s, 3, 1.0);  // phi'(0)
  Rhs rhs{pot.a, pot.b, lambda, L};

  double mu = std::sqrt(std::abs(lambda)) + std::abs(pot.a) + std::abs(pot.b) + 1.0;
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
  long steps = 0;
  try {
    steps = odeint::integrate_adaptive(stepper, rhs, s, 0.0, 1.0, 0.1 / mu);
  } catch (const odeint::step_adjustment_error&) {
    throw NonconvergenceError("fundamental_solutions: step size underflow at lambda=" + lambda_str(lambda));
  } catch (const odeint::no_progress_error&) {
    throw NonconvergenceError("fundamental_solutions: step size underflow at lambda=" + lambda_str(lambda));
  }
  if (steps_out) *steps_out = steps;
  return s;
}

FundamentalData unpack(const State& s, const Layout& L, cplx lambda, long steps) {
  FundamentalData fd;
  fd.lambda = lambda;
  fd.theta1 = get(s, 0);
  fd.dtheta1 = get(s, 1);
  fd.phi1 = get(s, 2);
  fd.dphi1 = get(s, 3);
  if (L.orders > 1) {
    fd.theta1_l = get(s, 4);
    fd.dtheta1_l = get(s, 5);
    fd.phi1_l = get(s, 6);
    fd.dphi1_l = get(s, 7);
  }
  if (L.orders > 2) {
    fd.theta1_ll = get(s, 8);
    fd.dtheta1_ll = get(s, 9);
    fd.phi1_ll = get(s, 10);
    fd.dphi1_ll = get(s, 11);
  }
  if (L.gram) {
    int g = L.gram_at();
    fd.g_tt = get(s, g).real();
    fd.g_pp = get(s, g + 1).real();
    fd.g_tp = get(s, g + 2);
  }
  // the Wronskian defect is the global certificate
  fd.est_error = std::abs(fd.wronskian() - 1.0);
  fd.steps = steps;
  return fd;
}

FundamentalData solve(const MathieuPotential& pot, cplx lambda, OdeLevel level, double tol) {
  Layout L;
  L.orders = level == OdeLevel::Values ? 1 : level == OdeLevel::FirstDerivative ? 2 : 3;
  long steps = 0;
  State s = integrate(pot, lambda, L, tol, &steps);
  return unpack(s, L, lambda, steps);
}

}  // namespace

FundamentalData fundamental_solutions(const MathieuPotential& pot, cplx lambda, OdeLevel level, bool gram) {
  Layout L;
  L.orders = level == OdeLevel::Values ? 1 : level == OdeLevel::FirstDerivative ? 2 : 3;
  L.gram = gram;
  long steps = 0;
  State s = integrate(pot, lambda, L, kTol, &steps);
  return unpack(s, L, lambda, steps);
}

cplx discriminant(const MathieuPotential& pot, cplx lambda) { return fundamental_solutions(pot, lambda).F(); }

cplx discriminant_derivative(const MathieuPotential& pot, cplx lambda) {
  return fundamental_solutions(pot, lambda, OdeLevel::FirstDerivative).dF();
}

Window window_around(double lo, double hi, const MathieuPotential& pot) {
  double h = 1.0 + 2.0 * std::abs(pot.a * pot.b);
  return {lo, hi, -h, h};
}

// ---------------------------------------------------------------- roots

namespace {

double dF_floor(cplx lambda) { return 1e-12 / std::max(1.0, std::sqrt(std::abs(lambda))); }

struct NewtonOut {
  cplx z;
  bool ok;
};

// Newton on F' (critical point) using F''
NewtonOut critical_newton(const MathieuPotential& pot, cplx z, int iters = 60) {
  for (int it = 0; it < iters; ++it) {
    auto fd = fundamental_solutions(pot, z, OdeLevel::SecondDerivative);
    cplx g = fd.dF(), h = fd.d2F();
    if (h == 0.0) return {z, false};
    cplx step = g / h;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return {z, false};
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) return {z, true};
  }
  auto fd = fundamental_solutions(pot, z, OdeLevel::SecondDerivative);
  return {z, std::abs(fd.dF()) <= 1e-9 * (1.0 + std::abs(fd.d2F()))};
}

}  // namespace

RootScan eigenvalues_at(const MathieuPotential& pot, double t, const Window& window,
                        std::optional<std::vector<cplx>> seeds) {
  if (!(window.re_hi > window.re_lo) || !(window.im_hi >= window.im_lo))
    throw ValidationError("eigenvalues_at: empty window");
  std::vector<cplx> start;
  if (seeds) {
    start = *seeds;
  } else {
    double r = std::max({std::abs(window.re_lo), std::abs(window.re_hi)});
    int n_max = int(std::ceil(std::sqrt(r) / kTwoPi)) + 1;
    auto sol = eig_adaptive(pot, t, n_max);
    for (cplx l : sol.lambdas)
      if (window.contains(l)) start.push_back(l);
  }
  const cplx target = 2.0 * std::cos(t);
  RootScan out;
  for (cplx seed : start) {
    cplx z = seed;
    bool ok = false;
    FundamentalData fd;
    for (int it = 0; it < 100; ++it) {
      fd = fundamental_solutions(pot, z, OdeLevel::FirstDerivative);
      cplx g = fd.F() - target;
      if (std::abs(g) <= 1e-12) {
        ok = true;
        break;
      }
      cplx d = fd.dF();
      if (d == 0.0) break;
      cplx step = g / d;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) {
        fd = fundamental_solutions(pot, z, OdeLevel::FirstDerivative);
        ok = std::abs(fd.F() - target) <= 1e-10;
        break;
      }
    }
    if (!ok) {
      fd = fundamental_solutions(pot, z, OdeLevel::FirstDerivative);
      ok = std::abs(fd.F() - target) <= 1e-10;
    }
    DiscriminantRoot r;
    r.seed = seed;
    // slow, flat convergence means F' vanishes at the root: polish as a critical point
    double mu = std::max(1.0, std::sqrt(std::abs(z)));
    if (std::abs(fd.dF()) * mu < 1e-4) {
      auto c = critical_newton(pot, z);
      if (c.ok) {
        auto fc = fundamental_solutions(pot, c.z, OdeLevel::FirstDerivative);
        if (std::abs(fc.F() - target) <= 1e-10 && std::abs(c.z - z) <= 1e-3 * mu) {
          z = c.z;
          fd = fc;
          ok = true;
          r.double_root = true;
        }
      }
    }
    if (!ok || std::abs(z - seed) > 0.5 * mu) {
      out.diverged_seeds.push_back(seed);
      continue;
    }
    r.lambda = z;
    r.dF = fd.dF();
    r.residual = std::abs(fd.F() - target);
    out.roots.push_back(r);
  }
  return out;
}

// ------------------------------------------------------- critical points

std::string to_string(CriticalFamily f) {
  switch (f) {
    case CriticalFamily::Periodic: return "periodic";
    case CriticalFamily::Antiperiodic: return "antiperiodic";
    default: return "interior";
  }
}

namespace {

struct ContourHit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArgWalker {
  const MathieuPotential& pot;

  cplx eval(cplx z) const {
    cplx v = fundamental_solutions(pot, z, OdeLevel::FirstDerivative).dF();
    if (std::abs(v) < 1e-11 / std::max(1.0, std::sqrt(std::abs(z)))) throw ContourHit("contour through a root");
    return v;
  }

  double segment(cplx z0, cplx f0, cplx z1, cplx f1, int depth) const {
    double d = std::arg(f1 / f0);
    if (std::abs(d) < kPi / 8 || depth > 24) return d;
    cplx zm = 0.5 * (z0 + z1);
    cplx fm = eval(zm);
    return segment(z0, f0, zm, fm, depth + 1) + segment(zm, fm, z1, f1, depth + 1);
  }

  double edge(cplx z0, cplx z1) const {
    // start from a handful of samples so the first comparison is meaningful
    int pieces = std::max(4, int(std::ceil(std::abs(z1 - z0) / 2.0)));
    pieces = std::min(pieces, 64);
    double total = 0.0;
    cplx zp = z0, fp = eval(z0);
    for (int i = 1; i <= pieces; ++i) {
      cplx z = z0 + (z1 - z0) * (double(i) / pieces);
      cplx f = eval(z);
      total += segment(zp, fp, z, f, 0);
      zp = z;
      fp = f;
    }
    return total;
  }

  int winding(const Window& w) const {
    cplx c0{w.re_lo, w.im_lo}, c1{w.re_hi, w.im_lo}, c2{w.re_hi, w.im_hi}, c3{w.re_lo, w.im_hi};
    double total = edge(c0, c1) + edge(c1, c2) + edge(c2, c3) + edge(c3, c0);
    return int(std::lround(total / kTwoPi));
  }
};

// extended-precision location of the pair degeneracy: disc(tau) is even in tau,
// so solve disc(s) = 0 in s = tau^2 by secant.
std::optional<cplx> refine_tau_sq(const MathieuPotential& pot, int n, bool anti, cplx s_guess) {
  int p = n, q = anti ? -n - 1 : -n;
  double anchor = anti ? kPi : 0.0;
  if (p <= q) return std::nullopt;
  int M = default_truncation(n + 2);
  auto disc = [&](cplx s) { return solve_pair(pot, anchor + std::sqrt(s), p, q, M).disc; };
  cplx s0 = 0.0, f0 = disc(s0);
  if (f0 == 0.0) return cplx(0.0);
  cplx s1 = s_guess == 0.0 ? cplx(1e-6) : s_guess;
  cplx f1 = disc(s1);
  for (int it = 0; it < 40; ++it) {
    if (f1 == f0) break;
    cplx s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
    s0 = s1;
    f0 = f1;
    s1 = s2;
    f1 = disc(s1);
    if (f1 == 0.0 || std::abs(s1 - s0) <= 1e-15 * std::abs(s1)) return s1;
  }
  if (std::abs(s1 - s0) <= 1e-10 * std::abs(s1)) return s1;
  return std::nullopt;
}

CriticalPoint classify(const MathieuPotential& pot, cplx z) {
  auto fd = fundamental_solutions(pot, z, OdeLevel::SecondDerivative);
  CriticalPoint cp;
  cp.lambda_star = z;
  cp.F = fd.F();
  cp.d2F = fd.d2F();
  cplx t = std::acos(0.5 * cp.F);
  if (t.real() < 0.0 || (t.real() == 0.0 && t.imag() < 0.0)) t = -t;  // collapse t* <-> -t*
  cp.t_star = t;
  int k = int(std::lround(std::sqrt(std::max(0.0, z.real())) / kPi));
  bool anti = k % 2 == 1;
  cp.n_guess = anti ? (k - 1) / 2 : k / 2;
  double anchor = anti ? kPi : 0.0;
  cplx tau = t - anchor;
  cp.tau_sq = tau * tau;
  if (std::abs(tau) < 5e-2 && (anti || cp.n_guess > 0)) {
    if (auto s = refine_tau_sq(pot, cp.n_guess, anti, cp.tau_sq)) {
      cp.tau_sq = *s;
      cplx r = std::sqrt(*s);
      cp.t_star = anti ? kPi - r : r;
      if (cp.t_star.real() < 0.0) cp.t_star = -cp.t_star;
      cp.refined = true;
    }
  }
  if (cp.refined) {
    double m = std::abs(cp.tau_sq);
    cp.t_real = m == 0.0 || (cp.tau_sq.real() >= 0.0 && std::abs(cp.tau_sq.imag()) <= 1e-8 * m);
    cp.is_two_periodic = std::sqrt(m) <= 1e-12;
  } else {
    cp.t_real = std::abs(cp.t_star.imag()) <= 1e-9 * (1.0 + std::abs(cp.t_star));
    cp.is_two_periodic = std::abs(cp.t_star) <= 1e-12 || std::abs(cp.t_star - kPi) <= 1e-12;
  }
  if (cp.is_two_periodic)
    cp.family = anti ? CriticalFamily::Antiperiodic : CriticalFamily::Periodic;
  else
    cp.family = CriticalFamily::Interior;
  return cp;
}

void scan(const MathieuPotential& pot, const ArgWalker& walker, const Window& w, int count, int depth,
          std::vector<cplx>& found) {
  if (count <= 0) return;
  if (count == 1) {
    cplx c{0.5 * (w.re_lo + w.re_hi), 0.5 * (w.im_lo + w.im_hi)};
    auto r = critical_newton(pot, c);
    double pad = 1e-9 * (1.0 + std::abs(c));
    Window grown{w.re_lo - pad, w.re_hi + pad, w.im_lo - pad, w.im_hi + pad};
    if (r.ok && grown.contains(r.z)) {
      found.push_back(r.z);
      return;
    }
  }
  if (depth > 40) throw NonconvergenceError("find_critical_points: subdivision limit reached");
  // split the longer side off-centre; a split line through a root is shifted and retried
  bool along_re = (w.re_hi - w.re_lo) >= (w.im_hi - w.im_lo);
  for (int attempt = 0; attempt < 6; ++attempt) {
    double f = 0.5 + 0.0371 * (attempt + 1) * (attempt % 2 ? -1.0 : 1.0);
    Window lo = w, hi = w;
    if (along_re) {
      double cut = w.re_lo + f * (w.re_hi - w.re_lo);
      lo.re_hi = cut;
      hi.re_lo = cut;
    } else {
      double cut = w.im_lo + f * (w.im_hi - w.im_lo);
      lo.im_hi = cut;
      hi.im_lo = cut;
    }
    int c_lo, c_hi;
    try {
      c_lo = walker.winding(lo);
      c_hi = walker.winding(hi);
    } catch (const ContourHit&) {
      continue;
    }
    scan(pot, walker, lo, c_lo, depth + 1, found);
    scan(pot, walker, hi, c_hi, depth + 1, found);
    return;
  }
  throw NonconvergenceError("find_critical_points: contour retries exhausted");
}

}  // namespace

int count_critical_points(const MathieuPotential& pot, const Window& w) { return ArgWalker{pot}.winding(w); }

std::vector<CriticalPoint> find_critical_points(const MathieuPotential& pot, const Window& window) {
  if (!(window.re_hi > window.re_lo) || !(window.im_hi > window.im_lo))
    throw ValidationError("find_critical_points: empty window");
  ArgWalker walker{pot};
  Window w = window;
  int count = -1;
  for (int attempt = 0; attempt < 6 && count < 0; ++attempt) {
    try {
      count = walker.winding(w);
    } catch (const ContourHit&) {
      double s = 1e-3 * (attempt + 1) * (1.0 + w.re_hi - w.re_lo);
      w = {window.re_lo - s, window.re_hi + s, window.im_lo - s, window.im_hi + s};
    }
  }
  if (count < 0) throw NonconvergenceError("find_critical_points: contour retries exhausted");
  std::vector<cplx> zs;
  scan(pot, walker, w, count, 0, zs);
  std::sort(zs.begin(), zs.end(), [](cplx x, cplx y) { return x.real() < y.real(); });
  std::vector<CriticalPoint> out;
  for (cplx z : zs) out.push_back(classify(pot, z));
  return out;
}

// ---------------------------------------------------------------- d_n

namespace {

struct DnPass {
  double abs_d;
  bool g_form;
  cplx dF;
};

DnPass dn_pass(const MathieuPotential& pot, double t, cplx z, double tol) {
  auto fd = solve(pot, z, OdeLevel::FirstDerivative, tol);
  if (std::abs(fd.dF()) < dF_floor(z))
    throw ValidationError("dn_via_wronskian: simpleness violation, |F'(lambda)| below threshold at lambda=" +
                          lambda_str(z));
  cplx ep = std::polar(1.0, t), em = std::polar(1.0, -t);
  // phi ~ 1/mu and theta' ~ mu: the switch compares them on a common scale
  double mu = std::max(1.0, std::sqrt(std::abs(z)));
  bool g_form = std::abs(fd.phi1) * mu < 1e-3 * std::max(1.0 / mu, std::abs(fd.dtheta1) / mu);
  Layout L;
  cplx den;
  if (!g_form) {
    // Phi_t = phi(1) theta + (e^{it} - theta(1)) phi
    L.combos = {{fd.phi1, ep - fd.theta1}, {fd.phi1, em - fd.theta1}};
    den = fd.phi1 * fd.dF();
  } else {
    // G_t = theta'(1) phi + (e^{it} - phi'(1)) theta
    L.combos = {{ep - fd.dphi1, fd.dtheta1}, {em - fd.dphi1, fd.dtheta1}};
    den = fd.dtheta1 * fd.dF();
  }
  State s = integrate(pot, z, L, tol, nullptr);
  double np = std::sqrt(std::max(0.0, get(s, L.combo_at()).real()));
  double nm = std::sqrt(std::max(0.0, get(s, L.combo_at() + 1).real()));
  double inv = np * nm / std::abs(den);
  if (!(inv > 0.0) || !std::isfinite(inv))
    throw ValidationError("dn_via_wronskian: degenerate boundary data at lambda=" + lambda_str(z));
  return {1.0 / inv, g_form, fd.dF()};
}

}  // namespace

std::optional<cplx> degeneracy_tau_sq(const MathieuPotential& pot, int n, bool antiperiodic, cplx guess) {
  if (n < 0 || (n == 0 && !antiperiodic)) throw ValidationError("degeneracy_tau_sq: no resonant pair for this n");
  return refine_tau_sq(pot, n, antiperiodic, guess);
}

WronskianDn dn_via_wronskian_detail(const MathieuPotential& pot, double t, cplx lambda_n) {
  auto fine = dn_pass(pot, t, lambda_n, kTol);
  auto coarse = dn_pass(pot, t, lambda_n, 1e3 * kTol);
  // an error eps in F displaces the root by eps / F'
  double shift = 1e-13 / std::abs(fine.dF);
  double sens = 0.0;
  try {
    auto moved = dn_pass(pot, t, lambda_n + shift, kTol);
    sens = std::abs(moved.abs_d - fine.abs_d);
  } catch (const ValidationError&) {
    sens = fine.abs_d;
  }
  WronskianDn out;
  out.abs_d = fine.abs_d;
  out.used_g_form = fine.g_form;
  out.dF = fine.dF;
  out.rel_error = (std::abs(fine.abs_d - coarse.abs_d) + sens) / fine.abs_d;
  return out;
}

double dn_via_wronskian(const MathieuPotential& pot, int, double t, cplx lambda_n) {
  return dn_via_wronskian_detail(pot, t, lambda_n).abs_d;
}

}  // namespace mh
