// polyreg: command-line driver for the verification modules.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "polyreg/suite.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace polyreg;

struct Globals {
  std::string json_path;
  std::string csv_path;
  std::string plot_path;
  unsigned jobs = 1;
  std::uint64_t seed = 20240917;
  double tolerance_scale = 1.0;
  bool seed_set = false;
  bool jobs_set = false;
  bool tol_set = false;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

// JSON goes to --json when given, to stdout otherwise.
void emit(const Globals& g, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (g.json_path.empty()) std::cout << text;
  else write_text(g.json_path, text);
}

int status(bool ok) { return ok ? 0 : 1; }

std::string fit_csv(const DecayFit& f) {
  std::string s = "x_r,y_r,cos_angle,value,predicted_bound\n";
  char buf[256];
  for (const auto& p : f.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", static_cast<double>(p.x_r),
                  static_cast<double>(p.y_r), static_cast<double>(p.cos_angle), static_cast<double>(p.value),
                  static_cast<double>(p.predicted_bound));
    s += buf;
  }
  return s;
}

// Two columns: regression abscissa and ordinate, as fitted.
std::string fit_plot(const DecayFit& f) {
  const bool log_y = f.estimate != Estimate::LogLaw;
  std::string s = "# " + to_string(f.estimate) + " m=" + std::to_string(f.m) + " n=" + std::to_string(f.n) +
                  (log_y ? "  log(scale)  log|value|\n" : "  log(1+d/|x-y|)  |value|\n");
  char buf[128];
  for (const auto& p : f.samples) {
    const double y = log_y ? std::log(std::abs(static_cast<double>(p.value))) : std::abs(static_cast<double>(p.value));
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", static_cast<double>(p.abscissa), y);
    s += buf;
  }
  return s;
}

json symbols_check(int m, int n, int q_max) {
  json j;
  j["m"] = m;
  j["n"] = n;
  const Rational a0 = a_sequence(m, m).back()(Rational(0));
  j["a_m_at_zero"] = {{"value", a0.get_str()},
                      {"closed_form", a_m_at_zero_closed_form(m).get_str()},
                      {"match", a0 == Rational(a_m_at_zero_closed_form(m))}};
  bool ok = j["a_m_at_zero"]["match"].get<bool>();
  if (n % 2 == 1) {
    const int q = q_max < 0 ? 2 * m + 5 : q_max;
    const auto id = check_symbol_identity(m, n, q);
    j["identity"] = {{"q_max", q}, {"real", id.real_ok}, {"imag", id.imag_ok}, {"parity", id.parity_ok}};
    ok = ok && id.ok();
    const auto lb = sweep_2_28(m, n, (1 << (m + 4)) * m + 4);
    j["lower_bound"] = to_json(lb);
    ok = ok && lb.certified && lb.monotone_violations == 0;
  } else {
    const auto eb = sweep_5_8(m, n, q_max < 0 ? 4 * m + 8 : q_max);
    j["even_bound"] = to_json(eb);
    ok = ok && eb.certified;
  }
  j["pass"] = ok;
  return j;
}

json positivity_check(int m, int n, std::optional<int> p, double scale) {
  PositivityOptions opt;
  opt.tolerance *= scale;
  json j;
  j["m"] = m;
  j["n"] = n;
  auto arr = json::array();
  bool ok = true;
  for (int pp : p ? std::vector<int>{*p} : admissible_p(m, n)) {
    const auto r = check_headline(m, n, pp, opt);
    json e = to_json(r);
    e["chain"] = to_json(chain(m, n, pp, opt));
    arr.push_back(e);
    ok = ok && r.pass();
  }
  j["cases"] = arr;
  j["pass"] = ok;
  return j;
}

json identity_check(const std::string& theorem, int m, int n, const std::string& modes, double R, int tau_points) {
  const auto family = parse_mode_spec(m, n, modes);
  if (theorem == "2.1") return to_json(check_thm_2_1(family));
  if (theorem == "4.2") return to_json(check_thm_4_2(family, tau_points));
  if (theorem == "5.1") {
    json j;
    const auto a = check_thm_5_1(family, PsiKind::One, R);
    const auto b = check_thm_5_1(family, PsiKind::CRplusT, R);
    j["psi_one"] = to_json(a);
    j["psi_log"] = to_json(b);
    j["pass"] = a.pass && b.pass;
    return j;
  }
  if (theorem == "6.3") return to_json(check_thm_6_3(family, R, tau_points));
  throw ConfigError("unknown theorem '" + theorem + "'", 0, "theorem");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyreg: exact and numerical checks for polyharmonic boundary regularity"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--json", g.json_path, "write the JSON report to this file (stdout otherwise)");
  app.add_option("--csv", g.csv_path, "write the sample table as CSV");
  app.add_option("--plot-data", g.plot_path, "write two-column plot data (file, or directory for suites)");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber)->each([&](const std::string&) {
    g.jobs_set = true;
  });
  app.add_option("--seed", g.seed, "seed for randomized property checks")->each([&](const std::string&) {
    g.seed_set = true;
  });
  app.add_option("--tolerance-scale", g.tolerance_scale, "multiplies numerical acceptance tolerances")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { g.tol_set = true; });
  app.fallthrough();

  int m = 0, n = 0;
  auto add_mn = [&](CLI::App* sc) {
    sc->add_option("--m", m, "polyharmonic order")->required()->check(CLI::Range(1, 64));
    sc->add_option("--n", n, "dimension")->required()->check(CLI::Range(2, 129));
  };

  auto* symbols = app.add_subcommand("symbols", "symbol identities and lower bounds");
  symbols->require_subcommand(1);
  auto* symbols_check_cmd = symbols->add_subcommand("check", "exact identity, spot values and sweeps");
  int q_max = -1;
  add_mn(symbols_check_cmd);
  symbols_check_cmd->add_option("--q-max", q_max, "largest mode for the identity check");

  auto* positivity = app.add_subcommand("positivity", "positivity certificates");
  positivity->require_subcommand(1);
  auto* positivity_cmd = positivity->add_subcommand("check", "certify the headline weight for each p");
  std::optional<int> p;
  add_mn(positivity_cmd);
  positivity_cmd->add_option("--p", p, "single p (default: every admissible p)");

  auto* fundsol = app.add_subcommand("fundsol", "fundamental solutions");
  fundsol->require_subcommand(1);
  auto* fundsol_cmd = fundsol->add_subcommand("build", "emit h and its residual report");
  add_mn(fundsol_cmd);

  auto* identity = app.add_subcommand("identity", "weighted energy inequalities");
  identity->require_subcommand(1);
  auto* identity_cmd = identity->add_subcommand("check", "feasible constants on a mode family");
  std::string theorem, modes = "standard";
  double R = 1;
  int tau_points = 9;
  add_mn(identity_cmd);
  identity_cmd->add_option("--theorem", theorem)->required()->check(CLI::IsMember({"2.1", "4.2", "5.1", "6.3"}));
  identity_cmd->add_option("--modes", modes, "\"standard\" or e.g. bump(q=0,c=3,w=2)+bump(q=1,c=3,w=1);gauss(q=0,c=20,w=0.5)");
  identity_cmd->add_option("--R", R, "domain scale for the even-dimension checks")->check(CLI::PositiveNumber);
  identity_cmd->add_option("--tau-points", tau_points, "pole positions per function")->check(CLI::Range(1, 200));

  auto* green = app.add_subcommand("green", "shell Green functions");
  green->require_subcommand(1);
  auto* green_cmd = green->add_subcommand("fit", "fit a decay exponent");
  double r0 = 1, r1 = 4;
  std::string estimate;
  double lo = 0, hi = 0;
  int per_decade = 12;
  add_mn(green_cmd);
  green_cmd->add_option("--r0", r0, "inner radius")->check(CLI::PositiveNumber);
  green_cmd->add_option("--r1", r1, "outer radius")->check(CLI::PositiveNumber);
  green_cmd->add_option("--estimate", estimate)->required()->check(CLI::IsMember({"8.25", "8.43", "8.5.1", "8.7.1"}));
  green_cmd->add_option("--log10-min", lo, "override the smallest sampled scale (log10)");
  green_cmd->add_option("--log10-max", hi, "override the largest sampled scale (log10)");
  green_cmd->add_option("--per-decade", per_decade, "samples per decade")->check(CLI::Range(1, 200));

  auto* cx = app.add_subcommand("counterexample", "sharpness counterexample, exact");
  add_mn(cx);

  auto* suite = app.add_subcommand("suite", "configured sweeps");
  suite->require_subcommand(1);
  auto* suite_cmd = suite->add_subcommand("run", "run a sweep and report");
  std::string config_path;
  std::vector<std::string> overrides;
  bool negative = false;
  suite_cmd->add_option("--config", config_path, "TOML-style key = value file")->check(CLI::ExistingFile);
  suite_cmd->add_option("--set", overrides, "key=value override (repeatable)");
  suite_cmd->add_flag("--negative-control", negative, "add a deliberately broken pairing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (symbols_check_cmd->parsed()) {
      const auto j = symbols_check(m, n, q_max);
      emit(g, j);
      return status(j["pass"].get<bool>());
    }
    if (positivity_cmd->parsed()) {
      const auto j = positivity_check(m, n, p, g.tolerance_scale);
      emit(g, j);
      return status(j["pass"].get<bool>());
    }
    if (fundsol_cmd->parsed()) {
      const auto j = fundsol_report(m, n);
      emit(g, j);
      return status(j["residual_zero"].get<bool>());
    }
    if (identity_cmd->parsed()) {
      const auto j = identity_check(theorem, m, n, modes, R, tau_points);
      emit(g, j);
      return status(j["pass"].get<bool>());
    }
    if (green_cmd->parsed()) {
      const Estimate e = parse_estimate(estimate);
      SamplePlan plan = default_plan(e);
      if (lo != 0 || hi != 0) plan.lo = lo, plan.hi = hi;
      plan.per_decade = per_decade;
      AssemblyOptions opt;
      opt.jobs = g.jobs;
      const auto f = fit_decay({r0, r1, n}, m, e, plan, opt, 0.05L * g.tolerance_scale);
      emit(g, to_json(f));
      if (!g.csv_path.empty()) write_text(g.csv_path, fit_csv(f));
      if (!g.plot_path.empty()) write_text(g.plot_path, fit_plot(f));
      return status(f.pass);
    }
    if (cx->parsed()) {
      const auto r = counterexample(m, n);
      emit(g, to_json(r));
      return status(r.pass());
    }
    if (suite_cmd->parsed()) {
      SweepConfig c = config_path.empty() ? SweepConfig{} : load_config(config_path);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        apply_setting(c, detail::trim(kv.substr(0, eq)), kv.substr(eq + 1));
      }
      if (g.jobs_set) c.jobs = g.jobs;
      if (g.seed_set) c.seed = g.seed;
      if (g.tol_set) c.tolerance_scale = g.tolerance_scale;
      if (negative) c.negative_control = true;
      if (!g.json_path.empty()) c.output = g.json_path;
      if (!g.csv_path.empty()) c.csv = g.csv_path;
      const Report rep = run_suite(c);
      for (const auto& cs : rep.cases) std::cerr << to_string(cs.status) << "  " << cs.id << "\n";
      std::cerr << rep.count(CaseStatus::Pass) << " pass, " << rep.count(CaseStatus::Fail) << " fail, "
                << rep.count(CaseStatus::Uncertified) << " uncertified\n";
      const std::string text = to_json(rep).dump(2) + "\n";
      if (c.output.empty()) std::cout << text;
      else write_text(c.output, text);
      if (!c.csv.empty()) write_text(c.csv, green_csv(rep));
      if (!g.plot_path.empty()) {
        std::filesystem::create_directories(g.plot_path);
        int k = 0;
        for (const auto& cs : rep.cases) {
          if (cs.module != "green" || !cs.payload.contains("samples")) continue;
          const bool log_y = cs.payload["estimate"] != "8.7.1";
          std::string s = "# " + cs.id + "\n";
          char buf[128];
          for (const auto& smp : cs.payload["samples"]) {
            const double v = std::abs(smp["value"].get<double>());
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", smp["abscissa"].get<double>(), log_y ? std::log(v) : v);
            s += buf;
          }
          write_text((std::filesystem::path(g.plot_path) / ("green_" + std::to_string(k++) + ".dat")).string(), s);
        }
      }
      return rep.exit_code();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (!e.field.empty()) std::cerr << " [" << e.field << "]";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
