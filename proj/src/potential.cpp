#include "mathieu/potential.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace mh {

double wrap_phase(double p) {
  double r = std::remainder(p, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

LogComplex LogComplex::from(cplx z) {
  if (z == 0.0) return zero();
  return {std::log(std::abs(z)), wrap_phase(std::arg(z))};
}

LogComplex LogComplex::polar_log(double logmag, double phase) {
  if (std::isinf(logmag) && logmag < 0) return zero();
  return {logmag, wrap_phase(phase)};
}

cplx LogComplex::value() const {
  if (is_zero()) return 0.0;
  return std::polar(std::exp(log_magnitude), phase);
}

double LogComplex::magnitude() const { return is_zero() ? 0.0 : std::exp(log_magnitude); }

LogComplex LogComplex::operator*(const LogComplex& o) const {
  if (is_zero() || o.is_zero()) return zero();
  return polar_log(log_magnitude + o.log_magnitude, phase + o.phase);
}

LogComplex LogComplex::operator/(const LogComplex& o) const {
  if (o.is_zero()) throw std::domain_error("LogComplex division by zero");
  if (is_zero()) return zero();
  return polar_log(log_magnitude - o.log_magnitude, phase - o.phase);
}

LogComplex LogComplex::pow(int k) const {
  if (k == 0) return {0.0, 0.0};
  if (is_zero()) return zero();
  return polar_log(k * log_magnitude, k * phase);
}

std::string Rational::str() const { return std::to_string(m) + "/" + std::to_string(q); }

std::string to_string(TriState s) {
  switch (s) {
    case TriState::Holds: return "holds";
    case TriState::Fails: return "fails";
    default: return "undecided-float";
  }
}

double alpha_of(const MathieuPotential& pot) {
  cplx ab = pot.a * pot.b;
  if (ab == 0.0) throw ValidationError("alpha undefined: ab = 0");
  double al = std::arg(ab) / kPi;
  if (al <= -1.0) al = 1.0;
  return al;
}

namespace {

// log of (2pi)^k k!
double log_scale(int k) { return k * std::log(kTwoPi) + std::lgamma(double(k) + 1.0); }

LogComplex power_over(cplx z, int power, int k) {
  if (z == 0.0) return LogComplex::zero();
  return LogComplex::polar_log(power * std::log(std::abs(z)) - 2.0 * log_scale(k), power * std::arg(z));
}

}  // namespace

AsymptoticConstants asymptotic_constants(const MathieuPotential& pot, int n) {
  if (n < 0) throw ValidationError("asymptotic_constants: n must be >= 0");
  AsymptoticConstants c;
  c.n = n;
  cplx ab = pot.a * pot.b;
  c.alpha_exponent = ab == 0.0 ? NAN : alpha_of(pot);
  if (n >= 1) {
    c.beta_n = power_over(pot.b, 2 * n, 2 * n - 1);
    c.alpha_n = power_over(pot.a, 2 * n, 2 * n - 1);
    if (c.beta_n.is_zero() || c.alpha_n.is_zero())
      c.epsilon_n = LogComplex::zero();
    else
      c.epsilon_n = {0.5 * (c.alpha_n.log_magnitude + c.beta_n.log_magnitude), 0.0};
  }
  c.tilde_beta_n = power_over(pot.b, 2 * n + 1, 2 * n);
  c.tilde_alpha_n = power_over(pot.a, 2 * n + 1, 2 * n);
  return c;
}

namespace {

// distance from x >= 0 to the nearest 2p-1, p >= 1
double odd_distance(double x, std::int64_t& p) {
  double k = std::floor(x / 2.0);
  p = std::int64_t(k) + 1;
  return std::abs(x - (2.0 * k + 1.0));
}

// inf over j of |(mult*j + shift) m/q - (2p-1)|, scanning past one period
double exact_min(std::int64_t m, std::int64_t q, int mult, int shift) {
  double best = INFINITY;
  for (std::int64_t j = 1; j <= 4 * q; ++j) {
    std::int64_t num = (mult * j + shift) * m;  // value num/q
    std::int64_t k = num / (2 * q);
    for (std::int64_t pp = std::max<std::int64_t>(1, k - 1); pp <= k + 2; ++pp) {
      double d = std::abs(double(num - q * (2 * pp - 1))) / double(q);
      best = std::min(best, d);
    }
  }
  return best;
}

}  // namespace

DiophantineVerdict check_diophantine(const Rational& alpha_in) {
  if (alpha_in.q == 0) throw ValidationError("rational with zero denominator");
  Rational r = alpha_in;
  if (r.q < 0) { r.q = -r.q; r.m = -r.m; }
  std::int64_t g = std::gcd(r.m, r.q);
  if (g > 1) { r.m /= g; r.q /= g; }

  DiophantineVerdict v;
  v.rational_input = r;
  v.alpha = r.value();
  std::int64_t m = std::llabs(r.m), q = r.q;
  bool m_odd = (m % 2) == 1;
  std::int64_t p_of_m = (m + 1) / 2;

  if (m_odd) {
    v.condition8 = {TriState::Fails, std::make_pair(q, p_of_m), 0.0, {}};
  } else {
    v.condition8 = {TriState::Holds, std::nullopt, exact_min(m, q, 1, 0), {}};
  }
  if (m != 0 && q % 2 == 0) {
    v.condition100 = {TriState::Fails, std::make_pair(q / 2, p_of_m), 0.0, {}};
  } else {
    v.condition100 = {TriState::Holds, std::nullopt, exact_min(m, q, 2, 0), {}};
  }
  if (m_odd && q % 2 == 1) {
    if (q >= 3)
      v.condition104 = {TriState::Fails, std::make_pair((q - 1) / 2, p_of_m), 0.0, {}};
    else
      v.condition104 = {TriState::Fails, std::make_pair<std::int64_t, std::int64_t>(1, (3 * m + 1) / 2), 0.0, {}};
  } else {
    v.condition104 = {TriState::Holds, std::nullopt, exact_min(m, q, 2, 1), {}};
  }
  return v;
}

namespace {

DiophantineProbe float_probe(double alpha, std::int64_t bound, int mult, int shift) {
  DiophantineProbe pr;
  pr.verdict = TriState::Undecided;
  pr.min_distance = INFINITY;
  for (std::int64_t q = 1; q <= bound; ++q) {
    std::int64_t p = 0;
    double d = odd_distance(double(mult * q + shift) * alpha, p);
    if (d < pr.min_distance) {
      pr.min_distance = d;
      pr.witness = std::make_pair(q, p);
      pr.rate_profile.emplace_back(q, double(q) * d);
    }
  }
  return pr;
}

}  // namespace

DiophantineVerdict check_diophantine(double alpha, std::int64_t search_bound) {
  if (search_bound < 1 || search_bound > 1000000)
    throw ValidationError("search_bound must lie in [1, 1e6]");
  if (!std::isfinite(alpha)) throw ValidationError("alpha must be finite");
  DiophantineVerdict v;
  v.alpha = alpha;
  double x = std::abs(alpha);
  v.condition8 = float_probe(x, search_bound, 1, 0);
  v.condition100 = float_probe(x, search_bound, 2, 0);
  v.condition104 = float_probe(x, search_bound, 2, 1);
  return v;
}

cplx parse_complex(const std::string& s_in) {
  auto bad = [&]() { return ValidationError("malformed complex literal: '" + s_in + "'"); };
  std::string s;
  char prev = 0;
  bool gap = false;
  for (char ch : s_in) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      gap = true;
      continue;
    }
    // "1 2" must not collapse into "12"; blanks are allowed only next to a sign
    if (gap && prev && prev != '+' && prev != '-' && ch != '+' && ch != '-') throw bad();
    gap = false;
    s += ch;
    prev = ch;
  }
  if (s.empty()) throw ValidationError("empty complex literal");
  const char* c = s.c_str();
  char* end = nullptr;

  if (s == "i" || s == "+i") return {0.0, 1.0};
  if (s == "-i") return {0.0, -1.0};

  double first = std::strtod(c, &end);
  if (end == c) throw bad();
  if (*end == '\0') return {first, 0.0};
  if (*end == 'i') {
    if (end[1] != '\0') throw bad();
    return {0.0, first};
  }
  if (*end != '+' && *end != '-') throw bad();
  const char* rest = end;
  double sign = (*rest == '-') ? -1.0 : 1.0;
  if (std::string(rest + 1) == "i") return {first, sign};
  char* end2 = nullptr;
  double second = std::strtod(rest, &end2);
  if (end2 == rest || *end2 != 'i' || end2[1] != '\0') throw bad();
  return {first, second};
}

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    std::size_t used = 0;
    Rational r;
    if (slash == std::string::npos) {
      r.m = std::stoll(s, &used);
      if (used != s.size()) throw ValidationError("x");
      return r;
    }
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    r.m = std::stoll(num, &used);
    if (used != num.size()) throw ValidationError("x");
    r.q = std::stoll(den, &used);
    if (used != den.size() || r.q == 0) throw ValidationError("x");
    if (r.q < 0) { r.q = -r.q; r.m = -r.m; }
    std::int64_t g = std::gcd(r.m, r.q);
    if (g > 1) { r.m /= g; r.q /= g; }
    return r;
  } catch (const std::exception&) {
    throw ValidationError("malformed rational: '" + s + "'");
  }
}

std::string format_complex(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real();
  if (z.imag() != 0.0) os << (std::signbit(z.imag()) ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace mh
