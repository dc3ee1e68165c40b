#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "mathieu/asymptotics.hpp"
#include "mathieu/discriminant.hpp"
#include "mathieu/expansion.hpp"
#include "mathieu/floquet.hpp"
#include "mathieu/report.hpp"
#include "mathieu/spectrality.hpp"

using namespace mh;
namespace fs = std::filesystem;

namespace {

struct JobConfig {
  std::string command;
  std::string a = "0", b = "0";
  std::string alpha_exact;
  int n_max = 3;
  int t_points = 64;
  int M_override = 0;
  int n = 1;
  std::string window;
  double h = 0.02;
  std::string out;
  std::uint64_t seed = 1;
  std::string test_function = "gaussian:0,0.5";
  std::string form;
};

std::string kv(const JobConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto q = [](const std::string& v) { return "\"" + v + "\""; };
  os << "a=" << q(c.a) << "\n";
  os << "b=" << q(c.b) << "\n";
  if (!c.alpha_exact.empty()) os << "alpha-exact=" << q(c.alpha_exact) << "\n";
  os << "nmax=" << c.n_max << "\n";
  os << "tpoints=" << c.t_points << "\n";
  if (c.M_override) os << "M=" << c.M_override << "\n";
  os << "n=" << c.n << "\n";
  if (!c.window.empty()) os << "window=" << q(c.window) << "\n";
  os << "h=" << c.h << "\n";
  os << "seed=" << c.seed << "\n";
  os << "test-function=" << q(c.test_function) << "\n";
  if (!c.form.empty()) os << "form=" << q(c.form) << "\n";
  return os.str();
}

std::pair<double, double> parse_window(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw ValidationError("window must be 'lo,hi'");
  try {
    double lo = std::stod(s.substr(0, comma)), hi = std::stod(s.substr(comma + 1));
    if (!(lo < hi)) throw ValidationError("window needs lo < hi");
    return {lo, hi};
  } catch (const std::invalid_argument&) {
    throw ValidationError("window must be 'lo,hi'");
  }
}

std::vector<double> t_grid(int points) {
  std::vector<double> g;
  for (int k = 0; k < points; ++k) g.push_back(-kPi + kTwoPi * (k + 1) / points);
  return g;
}

struct Emitter {
  const JobConfig& cfg;
  void file(const std::string& name, const std::string& body) const {
    if (cfg.out.empty()) return;
    std::ofstream f(fs::path(cfg.out) / name, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + (fs::path(cfg.out) / name).string());
    f << body;
  }
  void main(const Json& j) const {
    std::string s = dump(j);
    std::cout << s;
    file(cfg.command + ".json", s);
    file("job.conf", kv(cfg));
  }
};

int run_spectrum(const JobConfig& c, const MathieuPotential& pot, const Emitter& out) {
  auto grid = t_grid(c.t_points);
  auto curves = track_curves(pot, grid, -c.n_max, c.n_max, c.M_override);
  Json pl = Json::array();
  for (const auto& p : curves.pair_labels)
    pl.push_back(Json{{"n", p.n}, {"zone", p.zone}, {"first", p.first}, {"second", p.second}});
  std::vector<double> comp_grid;
  for (double t : grid)
    if (t >= 0.0) comp_grid.push_back(t);
  std::string comparison;
  std::vector<ComparisonRow> rows;
  for (int n = 1; n <= c.n_max; ++n) {
    auto r = compare_with_engine(pot, n, comp_grid);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.rel_err);
  out.file("spectrum.csv", spectrum_csv(curves));
  out.file("comparison.csv", comparison_csv(rows));
  Json j{{"n_range", {-c.n_max, c.n_max}}, {"t_points", c.t_points}, {"pair_labels", pl},
         {"ambiguities", curves.ambiguities}, {"asymptotic_max_rel_err", worst}};
  if (c.out.empty()) j["curves_csv"] = spectrum_csv(curves);
  out.main(artifact("spectrum", pot, j));
  return 0;
}

int run_profile(const JobConfig& c, const MathieuPotential& pot, const Emitter& out) {
  auto p = dn_profile(pot, c.n, t_grid(c.t_points));
  auto integral = integral_inverse_dn(pot, c.n, -kPi, kPi);
  Json j = to_json(p);
  j["integral_inverse_dn"] = to_json(integral);
  if (c.n >= 2 && pot.a * pot.b != 0.0) j["regions"] = to_json(region_decomposition(pot, c.n));
  out.file("profile.csv", profile_csv(p));
  out.main(artifact("profile", pot, j));
  return 0;
}

AlphaInput alpha_input(const JobConfig& c) {
  if (c.alpha_exact.empty()) return {};
  return parse_rational(c.alpha_exact);
}

int run_classify(const JobConfig& c, const MathieuPotential& pot, const Emitter& out) {
  ClassifyOptions opt;
  if (!c.window.empty()) opt.window_hi = parse_window(c.window).second;
  auto r = classify_operator(pot, alpha_input(c), opt);
  out.main(artifact("classify", pot, to_json(r)));
  return 0;
}

int run_singularities(const JobConfig& c, const MathieuPotential& pot, const Emitter& out) {
  auto [lo, hi] = c.window.empty() ? std::pair<double, double>{0.0, 250.0} : parse_window(c.window);
  auto scan = detect_singularities(pot, window_around(lo, hi, pot));
  Json j;
  j["window"] = {lo, hi};
  Json s = Json::array();
  for (const auto& cp : scan.singularities) s.push_back(to_json(cp));
  j["singularities"] = s;
  Json e = Json::array();
  for (const auto& x : scan.ess) e.push_back(to_json(x));
  j["ess"] = e;
  Json b = Json::array();
  for (const auto& x : scan.borderline) b.push_back(to_json(x));
  j["ess_borderline"] = b;
  Json pr = Json::array();
  int kmax = int(std::sqrt(std::max(0.0, hi)) / kPi);
  for (int k = 1; k <= kmax; ++k) {
    bool anti = k % 2 == 1;
    int n = anti ? (k - 1) / 2 : k / 2;
    pr.push_back(to_json(predict_double(pot, n, anti ? SeriesFamily::Antiperiodic : SeriesFamily::Periodic)));
  }
  j["predictions"] = pr;
  j["notes"] = scan.notes;
  out.main(artifact("singularities", pot, j));
  return 0;
}

ExpansionForm parse_form(const std::string& s) {
  if (s == "Elegant") return ExpansionForm::Elegant;
  if (s == "AsymptoticallyElegant") return ExpansionForm::AsymptoticallyElegant;
  if (s == "Gasymov") return ExpansionForm::Gasymov;
  throw ValidationError("unknown form '" + s + "'");
}

int run_expand(const JobConfig& c, const MathieuPotential& pot, const Emitter& out) {
  ExpansionPlan plan;
  plan.form = c.form.empty() ? expansion_form_of(pot) : parse_form(c.form);
  plan.n_max = c.n_max;
  plan.h = c.h;
  plan.detect_S = plan.form == ExpansionForm::AsymptoticallyElegant;
  auto f = parse_test_function(c.test_function);
  auto r = reconstruct(pot, f, plan, default_eval_points(f));
  Json j = to_json(r);
  j["test_function"] = f.describe();
  out.main(artifact("expand", pot, j));
  return 0;
}

struct Check {
  std::string name;
  bool pass;
  double value;
  double bound;
};

int run_verify(const JobConfig& c, const MathieuPotential& pot, const Emitter& out) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> uni(-kPi, kPi);
  std::vector<Check> checks;
  auto add = [&](const std::string& name, double v, double bound) { checks.push_back({name, v <= bound, v, bound}); };

  {
    double shift = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    MathieuPotential rot{pot.a * std::exp(cplx(0.0, -kTwoPi * shift)), pot.b * std::exp(cplx(0.0, kTwoPi * shift))};
    double worst = 0.0;
    for (double t : {0.3, 1.7, 3.0}) {
      int M = default_truncation(c.n_max + 2);
      auto e1 = eig(assemble(pot, t, M), pot).lambdas, e2 = eig(assemble(rot, t, M), rot).lambdas;
      for (const auto& z : e1) {
        if (std::abs(z) > std::pow(kTwoPi * c.n_max, 2) + 100.0) continue;
        double best = INFINITY;
        for (const auto& w : e2) best = std::min(best, std::abs(z - w));
        worst = std::max(worst, best / std::max(1.0, std::abs(z)));
      }
    }
    add("phase_rotation_invariance", worst, 1e-9);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      double t = std::abs(uni(rng));
      if (t < 1e-3 || kPi - t < 1e-3) continue;
      for (int n = -c.n_max; n <= c.n_max; ++n)
        worst = std::max(worst, std::abs(abs_dn(pot, n, t) - abs_dn(pot, n, -t)));
    }
    add("dn_symmetry", worst, 1e-8);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      double t = uni(rng);
      auto es = eig(assemble(pot, t, default_truncation(c.n_max + 2)), pot);
      for (std::size_t k = 0; k < es.lambdas.size(); ++k) {
        if (es.cluster_size[k] > 1 || std::abs(es.lambdas[k]) > std::pow(kTwoPi * c.n_max, 2)) continue;
        cplx F = discriminant(pot, es.lambdas[k]);
        worst = std::max(worst, std::abs(F - 2.0 * std::cos(t)));
      }
    }
    add("discriminant_oracle", worst, 1e-7);
  }
  {
    auto f = parse_test_function(c.test_function);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      double t = uni(rng);
      if (std::abs(t) < 1e-3 || kPi - std::abs(t) < 1e-3) continue;
      int n = int(std::uniform_int_distribution<int>(-c.n_max, c.n_max)(rng));
      auto bp = bloch_function(pot, t, n, std::abs(t) > kPi / 2 ? Family::Antiperiodic : Family::Periodic);
      cplx x0 = evaluate_bloch(bp.psi, 0.25) * bloch_coefficient(bp, f);
      cplx g1 = std::exp(cplx(0.0, uni(rng))), g2 = std::exp(cplx(0.0, uni(rng)));
      for (auto& v : bp.psi.coeffs) v *= g1;
      for (auto& v : bp.psi_star.coeffs) v *= g2;
      cplx x1 = evaluate_bloch(bp.psi, 0.25) * bloch_coefficient(bp, f);
      worst = std::max(worst, std::abs(x1 - x0) / std::max(1e-300, std::abs(x0)));
    }
    add("gauge_invariance", worst, 1e-12);
  }
  {
    int rank_fail = 0;
    double t = 1.0;
    auto es = eig(assemble(pot, t, default_truncation(c.n_max + 2)), pot);
    for (std::size_t k = 0; k < es.lambdas.size(); ++k)
      if (es.residuals[k] > 1e-8 * std::max(1.0, std::abs(es.lambdas[k]))) ++rank_fail;
    add("eigen_residuals", rank_fail, 0.0);
  }

  bool all = true;
  Json rows = Json::array();
  std::ostringstream table;
  table << std::left << std::setw(28) << "check" << std::setw(8) << "result" << "value (bound)\n";
  for (const auto& ch : checks) {
    all = all && ch.pass;
    rows.push_back(Json{{"name", ch.name}, {"pass", ch.pass}, {"value", ch.value}, {"bound", ch.bound}});
    table << std::left << std::setw(28) << ch.name << std::setw(8) << (ch.pass ? "PASS" : "FAIL") << ch.value << " ("
          << ch.bound << ")\n";
  }
  std::cerr << table.str();
  out.main(artifact("verify", pot, Json{{"seed", c.seed}, {"all_pass", all}, {"checks", rows}}));
  return all ? 0 : 1;
}

void error_json(const std::string& kind, const std::string& message) {
  std::cerr << Json{{"schema_version", kSchemaVersion}, {"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  JobConfig cfg;
  CLI::App app{"Floquet spectra, projection norms and expansion diagnostics for H(a,b)"};
  app.set_help_flag("--help", "print usage");
  app.set_config("--config", "", "flat key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--a", cfg.a, "coefficient a, e.g. 1+0.5i");
  app.add_option("--b", cfg.b, "coefficient b");
  app.add_option("--alpha-exact", cfg.alpha_exact, "alpha as m/q");
  app.add_option("--nmax", cfg.n_max, "band range |n| <= nmax");
  app.add_option("--tpoints", cfg.t_points, "quasimomentum grid size (>= 64)");
  app.add_option("--M", cfg.M_override, "Fourier truncation override");
  app.add_option("--n", cfg.n, "band index for profile");
  app.add_option("--window", cfg.window, "spectral window 'lo,hi'");
  app.add_option("--h", cfg.h, "pairing half-width for the Gasymov form");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--seed", cfg.seed, "seed for randomized checks");
  app.add_option("--test-function", cfg.test_function, "gaussian:c,w | modulated:c,w,freq | bump:c,s");
  app.add_option("--form", cfg.form, "Elegant | AsymptoticallyElegant | Gasymov");
  for (const char* name : {"spectrum", "profile", "classify", "singularities", "expand", "verify"})
    app.add_subcommand(name, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_json("validation", e.what());
    return 1;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (cfg.t_points < 64) throw ValidationError("tpoints must be >= 64");
    if (cfg.n_max < 1) throw ValidationError("nmax must be >= 1");
    if (cfg.M_override != 0 && cfg.M_override < 4) throw ValidationError("M must be >= 4");
    MathieuPotential pot{parse_complex(cfg.a), parse_complex(cfg.b)};
    if (!cfg.out.empty()) fs::create_directories(cfg.out);
    Emitter out{cfg};
    if (cfg.command == "spectrum") return run_spectrum(cfg, pot, out);
    if (cfg.command == "profile") return run_profile(cfg, pot, out);
    if (cfg.command == "classify") return run_classify(cfg, pot, out);
    if (cfg.command == "singularities") return run_singularities(cfg, pot, out);
    if (cfg.command == "expand") return run_expand(cfg, pot, out);
    return run_verify(cfg, pot, out);
  } catch (const ValidationError& e) {
    error_json("validation", e.what());
    return 1;
  } catch (const NonconvergenceError& e) {
    error_json("nonconvergence", e.what());
    return 2;
  } catch (const std::exception& e) {
    error_json("validation", e.what());
    return 1;
  }
}
