#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mh {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonconvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// q(x) = a e^{-2 pi i x} + b e^{2 pi i x}
struct MathieuPotential {
  cplx a{0.0, 0.0};
  cplx b{0.0, 0.0};

  bool is_free() const { return a == 0.0 && b == 0.0; }
  bool triangular() const { return a == 0.0 || b == 0.0; }
  MathieuPotential adjoint() const { return {std::conj(b), std::conj(a)}; }
  MathieuPotential swapped() const { return {b, a}; }
};

// z = exp(log_magnitude) e^{i phase}
struct LogComplex {
  double log_magnitude = -INFINITY;
  double phase = 0.0;

  static LogComplex zero() { return {}; }
  static LogComplex from(cplx z);
  static LogComplex polar_log(double logmag, double phase);

  bool is_zero() const { return std::isinf(log_magnitude) && log_magnitude < 0; }
  cplx value() const;
  double magnitude() const;

  LogComplex operator*(const LogComplex& o) const;
  LogComplex operator/(const LogComplex& o) const;
  LogComplex pow(int k) const;
};

double wrap_phase(double p);

struct AsymptoticConstants {
  int n = 0;
  double alpha_exponent = 0.0;  // NaN when ab = 0
  LogComplex beta_n, alpha_n;
  LogComplex tilde_beta_n, tilde_alpha_n;
  LogComplex epsilon_n;
};

struct Rational {
  std::int64_t m = 0;
  std::int64_t q = 1;
  double value() const { return double(m) / double(q); }
  std::string str() const;
};

enum class TriState { Holds, Fails, Undecided };
std::string to_string(TriState s);

struct DiophantineProbe {
  TriState verdict = TriState::Undecided;
  std::optional<std::pair<std::int64_t, std::int64_t>> witness;  // (q, p)
  double min_distance = 0.0;
  std::vector<std::pair<std::int64_t, double>> rate_profile;  // (q, q * dist) at record minima
};

struct DiophantineVerdict {
  DiophantineProbe condition8;    // |q alpha - (2p-1)|
  DiophantineProbe condition100;  // |2q alpha - (2p-1)|
  DiophantineProbe condition104;  // |(2q+1) alpha - (2p-1)|
  std::optional<Rational> rational_input;
  double alpha = 0.0;
};

double alpha_of(const MathieuPotential& pot);
AsymptoticConstants asymptotic_constants(const MathieuPotential& pot, int n);

DiophantineVerdict check_diophantine(const Rational& alpha);
DiophantineVerdict check_diophantine(double alpha, std::int64_t search_bound);

cplx parse_complex(const std::string& s);
Rational parse_rational(const std::string& s);
std::string format_complex(cplx z);

}  // namespace mh
