#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdn/dsl.hpp"
#include "qdn/errors.hpp"
#include "qdn/evolution.hpp"
#include "qdn/network.hpp"
#include "qdn/physics.hpp"
#include "qdn/signal.hpp"

namespace qdn::cli {
namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDiagnostic = 1;
constexpr int kExitIo = 2;

bool color_enabled() {
  const char* v = std::getenv("QDN_COLOR");
  return v && std::string_view(v) == "1";
}

std::string tag(const char* word, const char* ansi) {
  if (!color_enabled()) return word;
  return std::string("\x1b[") + ansi + "m" + word + "\x1b[0m";
}

void report(std::ostream& err, const Error& e) {
  err << tag("error", "1;31") << ": ";
  if (e.location()) err << e.location()->to_string() << ": ";
  err << e.kind() << ": " << e.what() << "\n";
}

void usage_error(std::ostream& err, const std::string& msg) {
  err << tag("error", "1;31") << ": usage: " << msg << "\n";
}

void warn(std::ostream& err, const std::string& msg) { err << tag("warning", "1;33") << ": " << msg << "\n"; }

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    report(err, e);
    return kExitIo;
  } catch (const Error& e) {
    report(err, e);
    return kExitDiagnostic;
  }
}

double rounded(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

ordered_json amplitude_json(Amplitude a) { return {{"re", rounded(a.real())}, {"im", rounded(a.imag())}}; }

ordered_json literal_json(const ParamValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  const Amplitude a = std::get<Amplitude>(v);
  return {{"re", a.real()}, {"im", a.imag()}};
}

std::string outcome_label(const std::vector<std::string>& fired) {
  if (fired.empty()) return "(void)";
  std::string out;
  for (const auto& d : fired) out += (out.empty() ? "" : "&") + d;
  return out;
}

Bindings parse_bindings(const std::vector<std::string>& items) {
  Bindings b;
  for (const auto& item : items) {
    auto [name, value] = dsl::parse_binding(item);
    b[name] = std::move(value);
  }
  return b;
}

void warn_unused(const NetworkGraph& g, const Bindings& b, std::ostream& err) {
  const auto used = g.parameter_names();
  for (const auto& [name, value] : b) {
    if (!used.count(name)) warn(err, "binding '" + name + "' is not referenced by the network");
  }
}

int run_sweep(const RunConfig& cfg, const NetworkGraph& g, Bindings fixed, std::ostream& out) {
  const SweepSpec& sw = *cfg.sweep;
  fixed.erase(sw.param);
  const auto table = sweep(g, fixed, sw.param, linspace(sw.start, sw.stop, sw.count));

  // Column labels come from a schedule compiled at the first point.
  Bindings first = fixed;
  first[sw.param] = table.values.front();
  const Schedule sched = compile(qdn::bind(g, first));
  std::vector<std::string> labels;
  for (BasisIndex k : table.outcomes) labels.push_back(outcome_label(sched.fired_detectors(k)));

  if (cfg.format == OutputFormat::Json) {
    ordered_json doc;
    doc["network"] = std::filesystem::path(cfg.input).filename().string();
    ordered_json bindings = ordered_json::object();
    for (const auto& [name, v] : fixed) bindings[name] = literal_json(v);
    doc["bindings"] = bindings;
    doc["param"] = sw.param;
    doc["columns"] = labels;
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < table.values.size(); ++r) {
      ordered_json probs = ordered_json::array();
      for (double p : table.probabilities[r]) probs.push_back(rounded(p));
      rows.push_back({{"value", table.values[r]}, {"probabilities", probs}});
    }
    doc["rows"] = rows;
    out << doc.dump(2) << "\n";
    return kExitOk;
  }

  out << sw.param;
  for (const auto& l : labels) out << "," << l;
  out << "\n";
  for (std::size_t r = 0; r < table.values.size(); ++r) {
    out << format_number(table.values[r]);
    for (double p : table.probabilities[r]) out << "," << format_number(p);
    out << "\n";
  }
  return kExitOk;
}

// Catalog defaults used by `verify` for each shipped module type.
std::map<std::string, ParamValue> default_params(const std::string& type) {
  const double h = std::numbers::sqrt2 / 2.0;
  const double third = 1.0 / std::numbers::sqrt3;
  if (type == "beamsplitter") {
    return {{"alpha", Amplitude{h, 0}}, {"beta", Amplitude{0, h}}, {"gamma", Amplitude{0, h}},
            {"delta", Amplitude{h, 0}}};
  }
  if (type == "mirror" || type == "phase") return {{"phase", 0.7}};
  if (type == "wollaston") {
    return {{"theta", std::numbers::pi / 3}, {"alphain", Amplitude{third, 0}}, {"betain", Amplitude{third, 0}}};
  }
  if (type == "brandt_bs") return {{"theta", std::numbers::pi / 3}};
  if (type == "pairsource") return {{"theta", 0.5}};
  return {};
}

std::map<std::string, ParamValue> parse_param_list(const std::string& text) {
  std::map<std::string, ParamValue> params;
  std::istringstream in(text);
  std::string item;
  while (in >> item) {
    auto [name, value] = dsl::parse_binding(item);
    params[name] = std::move(value);
  }
  return params;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  const auto c1 = text.find(':', eq == std::string::npos ? 0 : eq);
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos) {
    throw SyntaxError("expected --sweep name=start:stop:count, got '" + text + "'");
  }
  auto real = [&](const std::string& s) {
    const ParamValue v = dsl::parse_literal(s);
    if (!std::holds_alternative<double>(v)) throw LiteralError("sweep bounds must be real, got '" + s + "'");
    return std::get<double>(v);
  };
  SweepSpec spec;
  spec.param = text.substr(0, eq);
  spec.start = real(text.substr(eq + 1, c1 - eq - 1));
  spec.stop = real(text.substr(c1 + 1, c2 - c1 - 1));
  const std::string count = text.substr(c2 + 1);
  const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), spec.count);
  if (ec != std::errc() || ptr != count.data() + count.size()) {
    throw SyntaxError("sweep count must be a non-negative integer, got '" + count + "'");
  }
  if (spec.count < 2) throw ParamError("sweep count must be at least 2");
  return spec;
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const NetworkGraph g = dsl::parse_file(cfg.input);
    Bindings b = parse_bindings(cfg.bindings);
    warn_unused(g, b, err);
    if (cfg.sweep) return run_sweep(cfg, g, std::move(b), out);

    const Schedule sched = compile(qdn::bind(g, b));
    const Labstate final_state = evaluate(sched);
    const auto outcomes = reported_outcomes(sched, final_state);
    const double total = final_state.norm_squared();

    std::optional<BasisIndex> sample;
    if (cfg.seed) {
      std::mt19937_64 rng(*cfg.seed);
      sample = born_map_reduce(normalize(final_state), rng);
    }

    if (cfg.format == OutputFormat::Json) {
      ordered_json doc;
      doc["network"] = std::filesystem::path(cfg.input).filename().string();
      ordered_json bindings = ordered_json::object();
      for (const auto& [name, v] : b) bindings[name] = literal_json(v);
      doc["bindings"] = bindings;
      ordered_json list = ordered_json::array();
      for (BasisIndex k : outcomes) {
        const Amplitude a = final_state.amplitude(k);
        list.push_back({{"detectors", sched.fired_detectors(k)},
                        {"probability", rounded(std::norm(a))},
                        {"amplitude", amplitude_json(a)}});
      }
      doc["outcomes"] = list;
      doc["total_probability"] = rounded(total);
      if (sample) doc["sample"] = {{"detectors", sched.fired_detectors(*sample)}, {"seed", *cfg.seed}};
      out << doc.dump(2) << "\n";
    } else if (cfg.format == OutputFormat::Csv) {
      out << "outcome,probability,re,im\n";
      for (BasisIndex k : outcomes) {
        const Amplitude a = final_state.amplitude(k);
        out << outcome_label(sched.fired_detectors(k)) << "," << format_number(std::norm(a)) << ","
            << format_number(a.real()) << "," << format_number(a.imag()) << "\n";
      }
    } else {
      std::size_t width = 7;
      for (BasisIndex k : outcomes) width = std::max(width, outcome_label(sched.fired_detectors(k)).size());
      width += 2;
      out << std::left << std::setw(static_cast<int>(width)) << "outcome" << std::setw(18) << "probability"
          << "amplitude\n";
      for (BasisIndex k : outcomes) {
        const Amplitude a = final_state.amplitude(k);
        out << std::setw(static_cast<int>(width)) << outcome_label(sched.fired_detectors(k))
            << std::setw(18) << format_number(std::norm(a)) << "(" << format_number(a.real()) << ","
            << format_number(a.imag()) << ")\n";
      }
      out << std::setw(static_cast<int>(width)) << "total" << format_number(total) << "\n";
      if (sample) {
        out << std::setw(static_cast<int>(width)) << "sample" << outcome_label(sched.fired_detectors(*sample))
            << "\n";
      }
    }
    return kExitOk;
  });
}

int cmd_verify(const VerifyConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.rank < 1 || cfg.rank > 5) {
    usage_error(err, "--rank must be between 1 and 5 (got " + std::to_string(cfg.rank) + ")");
    return kExitDiagnostic;
  }
  return guarded(err, [&] {
    bool ok = true;
    const auto alg = verify_signal_algebra(cfg.rank);
    ok = ok && alg.passed;
    out << "signal algebra  rank " << alg.rank << "  " << (alg.passed ? "pass" : "FAIL") << "  pairs "
        << alg.pairs_checked << "  max deviation " << format_number(alg.max_deviation) << "\n";

    for (const auto& type : module_types()) {
      auto params = default_params(type.name);
      if (type.name == "beamsplitter" && cfg.bs_params) params = parse_param_list(*cfg.bs_params);
      out << "module " << std::left << std::setw(14) << type.name;
      try {
        const ModuleAction action = build_action(type, params);
        const auto rep = check_semi_unitary(SemiUnitaryDense{action.in_arity(), action.out_arity(),
                                                             action.local_matrix()});
        const bool passed = rep.accepted && action.isolated();
        ok = ok && passed;
        out << (passed ? "pass" : "FAIL") << "  deviation " << format_number(rep.max_deviation);
        if (!action.isolated()) out << "  void is not preserved";
        out << "\n";
      } catch (const ParamError& e) {
        ok = false;
        out << "FAIL  " << e.what() << "\n";
      } catch (const ArityError& e) {
        ok = false;
        out << "FAIL  " << e.what() << "\n";
      } catch (const std::out_of_range&) {
        ok = false;
        out << "FAIL  missing parameters\n";
      }
    }
    return ok ? kExitOk : kExitDiagnostic;
  });
}

int cmd_decay(const DecayConfig& cfg, std::ostream& out, std::ostream& err) {
  const int regimes = cfg.alpha2.has_value() + cfg.alpha.has_value() + cfg.gamma_exp.has_value() +
                      cfg.gamma_zeno.has_value();
  if (regimes != 1) {
    usage_error(err, "give exactly one of --alpha2, --alpha, --gamma-exp, --gamma-zeno");
    return kExitDiagnostic;
  }
  if (cfg.steps.has_value() == cfg.t.has_value()) {
    usage_error(err, "give exactly one of --steps, --t");
    return kExitDiagnostic;
  }
  return guarded(err, [&] {
    using physics::DecayModel;
    std::optional<DecayModel> m;
    if (cfg.alpha2) {
      if (!(*cfg.alpha2 >= 0.0 && *cfg.alpha2 <= 1.0)) throw ParamError("--alpha2 must lie in [0, 1]");
      m = DecayModel::explicit_alpha(std::sqrt(*cfg.alpha2), cfg.tau);
    } else if (cfg.alpha) {
      const ParamValue v = dsl::parse_literal(*cfg.alpha);
      if (const auto* d = std::get_if<double>(&v)) {
        m = DecayModel::explicit_alpha(*d, cfg.tau);
      } else if (const auto* c = std::get_if<Amplitude>(&v)) {
        m = DecayModel::explicit_alpha(*c, cfg.tau);
      } else {
        throw LiteralError("--alpha must be a literal");
      }
    } else if (cfg.gamma_exp) {
      m = DecayModel::exponential(*cfg.gamma_exp, cfg.tau);
    } else {
      m = DecayModel::zeno(*cfg.gamma_zeno, cfg.tau);
    }

    std::uint64_t n = 0;
    if (cfg.steps) {
      n = *cfg.steps;
    } else {
      const auto snap = physics::snap_steps(*cfg.t, cfg.tau);
      if (snap.off_grid) {
        warn(err, "t/tau = " + format_number(*cfg.t / cfg.tau) + " is not an integer; using " +
                      std::to_string(snap.steps) + " steps");
      }
      n = snap.steps;
    }
    constexpr std::uint64_t kMaxRows = 10'000'000;
    if (n > kMaxRows) throw ParamError("at most " + std::to_string(kMaxRows) + " steps are tabulated");

    const double beta2 = m->beta() * m->beta();
    auto channel = [&](std::uint64_t k) { return k == 0 ? 0.0 : beta2 * m->survival_after(k - 1); };

    if (cfg.json) {
      const char* regime = m->regime() == physics::DecayRegime::Exponential ? "exponential"
                           : m->regime() == physics::DecayRegime::Zeno      ? "zeno"
                                                                            : "explicit";
      double total = m->survival_after(n);
      ordered_json rows = ordered_json::array();
      for (std::uint64_t k = 0; k <= n; ++k) {
        total += channel(k);
        rows.push_back({{"step", k},
                        {"time", rounded(static_cast<double>(k) * m->tau())},
                        {"survival", rounded(m->survival_after(k))},
                        {"channel", rounded(channel(k))}});
      }
      ordered_json doc;
      doc["regime"] = regime;
      doc["alpha"] = amplitude_json(m->alpha());
      doc["beta"] = rounded(m->beta());
      doc["tau"] = m->tau();
      doc["steps"] = n;
      doc["survival"] = rounded(m->survival_after(n));
      doc["total_probability"] = rounded(total);
      doc["rows"] = rows;
      out << doc.dump(2) << "\n";
      return kExitOk;
    }

    out << "step,time,survival,channel\n";
    for (std::uint64_t k = 0; k <= n; ++k) {
      out << k << "," << format_number(static_cast<double>(k) * m->tau()) << ","
          << format_number(m->survival_after(k)) << "," << format_number(channel(k)) << "\n";
    }
    return kExitOk;
  });
}

int cmd_horizon(const HorizonConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.v == 0.0) {
    usage_error(err, "--v must be nonzero; at v = 0 the horizon event is at spatial infinity");
    return kExitDiagnostic;
  }
  return guarded(err, [&] {
    const auto h = physics::quantum_horizon(cfg.v, cfg.tprime, cfg.c);
    const double gamma = physics::lorentz_factor(cfg.v, cfg.c);
    if (cfg.json) {
      ordered_json doc;
      doc["v"] = cfg.v;
      doc["c"] = cfg.c;
      doc["tprime"] = cfg.tprime;
      doc["gamma"] = rounded(gamma);
      doc["F"] = {{"t", rounded(h.in_f.t)}, {"x", rounded(h.in_f.x)}};
      doc["F_prime"] = {{"t", rounded(h.in_f_prime.t)}, {"x", rounded(h.in_f_prime.x)}};
      doc["residual"] = h.residual;
      out << doc.dump(2) << "\n";
      return kExitOk;
    }
    out << "gamma     " << format_number(gamma) << "\n";
    out << "F         (" << format_number(h.in_f.t) << ", " << format_number(h.in_f.x) << ")\n";
    out << "F'        (" << format_number(h.in_f_prime.t) << ", " << format_number(h.in_f_prime.x) << ")\n";
    out << "residual  " << format_number(h.residual) << "\n";
    return kExitOk;
  });
}

int cmd_fmt(const FmtConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = dsl::serialize(dsl::parse_file(cfg.input));
    if (!cfg.in_place) {
      out << text;
      return kExitOk;
    }
    std::ofstream file(cfg.input, std::ios::binary | std::ios::trunc);
    if (!file || !(file << text) || !file.flush()) throw IoError("cannot write '" + cfg.input + "'");
    return kExitOk;
  });
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantized detector network simulator", "qdn"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  bool as_json = false;
  bool as_csv = false;
  std::optional<std::uint64_t> seed;
  std::string sweep_text;
  auto* run = app.add_subcommand("run", "Evaluate a network and print outcome probabilities");
  run->add_option("file", run_cfg.input, "Network description (.qdn)")->required();
  run->add_option("--set", run_cfg.bindings, "Bind a parameter, name=literal (repeatable)")
      ->allow_extra_args(false);
  auto* json_flag = run->add_flag("--json", as_json, "JSON output");
  run->add_flag("--csv", as_csv, "CSV output")->excludes(json_flag);
  run->add_option("--seed", seed, "Also sample one outcome with this seed");
  run->add_option("--sweep", sweep_text, "Sweep a parameter, name=start:stop:count");

  VerifyConfig verify_cfg;
  std::string bs_params;
  auto* verify = app.add_subcommand("verify", "Check the signal algebra and every module type");
  verify->add_option("--rank", verify_cfg.rank, "Register rank, 1 to 5");
  verify->add_option("--bs-params", bs_params, "Beam splitter parameters to check instead of the default");

  DecayConfig decay_cfg;
  auto* decay = app.add_subcommand("decay", "Tabulate survival and decay-channel probabilities");
  decay->add_option("--alpha2", decay_cfg.alpha2, "Survival probability per step");
  decay->add_option("--alpha", decay_cfg.alpha, "Survival amplitude per step (literal)");
  decay->add_option("--gamma-exp", decay_cfg.gamma_exp, "Exponential regime rate Gamma (1/s)");
  decay->add_option("--gamma-zeno", decay_cfg.gamma_zeno, "Zeno regime coefficient gamma (1/s^2)");
  decay->add_option("--tau", decay_cfg.tau, "Step length (s)");
  decay->add_option("--steps", decay_cfg.steps, "Number of steps");
  decay->add_option("--t", decay_cfg.t, "Elapsed time (s), snapped to the step grid");
  decay->add_flag("--json", decay_cfg.json, "JSON output");

  HorizonConfig horizon_cfg;
  auto* horizon = app.add_subcommand("horizon", "Coordinates of the quantum-horizon event in both frames");
  horizon->add_option("--v", horizon_cfg.v, "Relative velocity (m/s)")->required();
  horizon->add_option("--c", horizon_cfg.c, "Speed of light (m/s)");
  horizon->add_option("--tprime", horizon_cfg.tprime, "T' in the moving frame (s)");
  horizon->add_flag("--json", horizon_cfg.json, "JSON output");

  FmtConfig fmt_cfg;
  auto* fmt = app.add_subcommand("fmt", "Print a network in canonical form");
  fmt->add_option("file", fmt_cfg.input, "Network description (.qdn)")->required();
  fmt->add_flag("-i,--in-place", fmt_cfg.in_place, "Rewrite the file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitDiagnostic;
  }

  if (run->parsed()) {
    run_cfg.format = as_json ? OutputFormat::Json : as_csv ? OutputFormat::Csv : OutputFormat::Human;
    run_cfg.seed = seed;
    if (!sweep_text.empty()) {
      try {
        run_cfg.sweep = parse_sweep(sweep_text);
      } catch (const Error& e) {
        usage_error(err, e.what());
        return kExitDiagnostic;
      }
    }
    return cmd_run(run_cfg, out, err);
  }
  if (verify->parsed()) {
    if (!bs_params.empty()) verify_cfg.bs_params = bs_params;
    return cmd_verify(verify_cfg, out, err);
  }
  if (decay->parsed()) return cmd_decay(decay_cfg, out, err);
  if (horizon->parsed()) return cmd_horizon(horizon_cfg, out, err);
  return cmd_fmt(fmt_cfg, out, err);
}

}  // namespace qdn::cli
