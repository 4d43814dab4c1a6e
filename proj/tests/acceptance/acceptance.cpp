// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qdn/dsl.hpp"
#include "qdn/errors.hpp"
#include "qdn/evolution.hpp"
#include "qdn/network.hpp"
#include "qdn/optics.hpp"
#include "qdn/physics.hpp"
#include "qdn/signal.hpp"

using namespace qdn;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = QDN_CORPUS_DIR;
constexpr double kPi = std::numbers::pi;

// Collects the worst deviation seen and the first failure message.
struct Check {
  double worst = 0.0;
  std::string failure;
  std::string note;

  void near(double got, double want, double tol, const std::string& what) {
    const double d = std::abs(got - want);
    if (d > worst) worst = d;
    if (!(d <= tol) && failure.empty()) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s: got %.15g, want %.15g", what.c_str(), got, want);
      failure = buf;
    }
  }
  void that(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
};

double prob(const Schedule& s, const Labstate& f, std::vector<std::string> fired) {
  return outcome_probability(s, f, fired);
}

std::pair<Schedule, Labstate> run_file(const char* name, const Bindings& b) {
  const Schedule s = compile(qdn::bind(dsl::parse_file(kCorpus / name), b));
  return {s, evaluate(s)};
}

Check brandt() {
  Check c;
  // alpha = x e^{i chi}, beta = y e^{i chi}; a common phase keeps alpha* beta real.
  struct Set {
    double theta, x, chi;
  };
  const std::vector<Set> sets{
      {kPi / 3, 1 / std::sqrt(3.0), 0.0}, {0.3, 0.8, 0.0}, {1.2, -0.4, 0.0}, {kPi / 2, 0.6, 0.0}, {0.9, 0.5, kPi / 2}};
  for (const auto& [theta, x, chi] : sets) {
    const double y = -x * std::cos(theta) + std::sqrt(1 - x * x * std::sin(theta) * std::sin(theta));
    const Amplitude alpha = x * std::polar(1.0, chi), beta = y * std::polar(1.0, chi);

    const auto [s, f] = run_file("brandt.qdn", {{"theta", theta}, {"a", alpha}, {"b", beta}});
    const double ct = std::cos(theta);
    const double w = prob(s, f, {"w"}), u = prob(s, f, {"u"}), v = prob(s, f, {"v"});
    const std::string tag = "theta=" + std::to_string(theta);
    c.near(w, std::norm(alpha + beta) * ct, 1e-10, tag + " P(w)");
    c.near(u, std::norm(alpha) * (1 - ct), 1e-10, tag + " P(u)");
    c.near(v, std::norm(beta) * (1 - ct), 1e-10, tag + " P(v)");
    c.near(w + u + v, 1.0, 1e-12, tag + " sum");
    if (theta == kPi / 3) {
      c.near(w, 2.0 / 3.0, 1e-10, "P(w) at pi/3");
      c.near(u, 1.0 / 6.0, 1e-10, "P(u) at pi/3");
      c.near(v, 1.0 / 6.0, 1e-10, "P(v) at pi/3");
    }
  }
  return c;
}

Check identity_interferometer() {
  Check c;
  const auto [s, f] = run_file("mz-identity.qdn", {});
  c.near(prob(s, f, {"D8"}), 1.0, 1e-12, "P(D8)");
  c.near(prob(s, f, {"D7"}), 0.0, 1e-12, "P(D7)");
  return c;
}

Check fringes() {
  Check c;
  const NetworkGraph g = dsl::parse_file(kCorpus / "mach-zehnder.qdn");
  const auto values = linspace(0.0, 2 * kPi, 64);
  const SweepTable t = sweep(g, {}, "phi", values);
  c.that(t.probabilities.size() == 64, "sweep row count");
  const auto col = [&](const char* d) {
    const Schedule s = compile(qdn::bind(g, {{"phi", 0.0}}));
    const BasisIndex k = s.outcome_index({d});
    for (std::size_t i = 0; i < t.outcomes.size(); ++i) {
      if (t.outcomes[i] == k) return i;
    }
    return t.outcomes.size();
  };
  const std::size_t d7 = col("D7"), d8 = col("D8");
  c.that(d7 < t.outcomes.size() && d8 < t.outcomes.size(), "detector columns present");
  if (!c.failure.empty()) return c;
  for (std::size_t r = 0; r < values.size(); ++r) {
    const double h = values[r] / 2;
    c.near(t.probabilities[r][d7], std::cos(h) * std::cos(h), 1e-10, "D7 at row " + std::to_string(r));
    c.near(t.probabilities[r][d8], std::sin(h) * std::sin(h), 1e-10, "D8 at row " + std::to_string(r));
  }
  return c;
}

Check hsz() {
  Check c;
  const NetworkGraph g = dsl::parse_file(kCorpus / "hsz-two-photon.qdn");
  for (double theta : {0.0, kPi / 4}) {
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        const double phi1 = 2 * kPi * i / 16, phi2 = 2 * kPi * j / 16;
        const Schedule s = compile(qdn::bind(g, {{"theta", theta}, {"phi1", phi1}, {"phi2", phi2}}));
        const Labstate f = evaluate(s);
        const double plus = 0.25 * (1 + std::cos(phi2 - phi1 + theta));
        const double minus = 0.25 * (1 - std::cos(phi2 - phi1 + theta));
        const double uu = prob(s, f, {"U1", "U2"}), ll = prob(s, f, {"L1", "L2"});
        const double ul = prob(s, f, {"U1", "L2"}), lu = prob(s, f, {"L1", "U2"});
        c.near(uu, plus, 1e-10, "U1&U2");
        c.near(ll, plus, 1e-10, "L1&L2");
        c.near(ul, minus, 1e-10, "U1&L2");
        c.near(lu, minus, 1e-10, "L1&U2");
        c.near(uu + ll + ul + lu, 1.0, 1e-12, "coincidence sum");
      }
    }
  }
  return c;
}

Check signal_algebra() {
  Check c;
  for (Rank r = 1; r <= 5; ++r) {
    const auto rep = verify_signal_algebra(r);
    c.that(rep.passed, "rank " + std::to_string(r) + " failed");
    c.that(rep.max_deviation == 0.0, "rank " + std::to_string(r) + " nonzero deviation");
    c.that(rep.pairs_checked == r * (r - 1) / 2, "pair count at rank " + std::to_string(r));
    c.worst = std::max(c.worst, rep.max_deviation);
  }
  const std::vector<std::pair<BasisIndex, BasisIndex>> listing{{1, 0}, {3, 2}, {5, 4}, {7, 6}};
  c.that(create_transitions(1, 3) == listing, "rank-3 listing of A1+");
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(8, 8);
  for (const auto& [to, from] : listing) want(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) = 1;
  c.that(dense_create(1, 3) == want, "dense A1+ at rank 3");
  return c;
}

Check signal_theorem() {
  Check c;
  const Amplitude a{0.6, 0}, b{0, 0.8}, cc{0.8, 0}, d{0, -0.6};
  const auto slit = check_signal_theorem({{1, Labstate(3, {{1, a}, {2, b}})}, {2, Labstate(3, {{2, cc}, {4, d}})}});
  c.that(!slit.accepted, "two-slit proposal accepted");
  c.near(std::abs(slit.overlap - std::conj(b) * cc), 0.0, 1e-15, "reported overlap");
  c.that(std::abs(slit.overlap) > 0.1, "overlap is zero");

  const auto p = optics::symmetric_params();
  const auto beam = check_signal_theorem({{0, Labstate::void_state(2)},
                                          {1, Labstate(2, {{1, p.alpha}, {2, p.beta}})},
                                          {2, Labstate(2, {{1, p.gamma}, {2, p.delta}})},
                                          {3, Labstate::basis(2, 3)}});
  c.that(beam.accepted, "beam splitter images rejected");

  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 200; ++trial) {
    const Rank in = 1 + trial % 4;
    const Rank out = in + (trial / 4) % 2;
    const auto u = testing::random_isometry(dimension(out), dimension(in), rng);
    const StageMap stage = StageMap::dense({in, out, u});
    const Labstate x = testing::random_state(in, rng), y = testing::random_state(in, rng);
    const Amplitude before = inner_product(x, y);
    const Amplitude after = inner_product(apply_stage(stage, x), apply_stage(stage, y));
    c.near(std::abs(after - before), 0.0, 1e-10, "inner product, trial " + std::to_string(trial));
  }
  return c;
}

Check decay() {
  Check c;
  const auto m = physics::DecayModel::explicit_alpha(std::sqrt(0.9));
  for (unsigned n = 0; n <= 50; ++n) {
    c.near(m.survival_after(n), std::pow(0.9, n), 1e-12, "0.9^" + std::to_string(n));
    c.near(physics::decay_state(m, n).norm_squared(), 1.0, 1e-12, "total at n=" + std::to_string(n));
  }
  for (double gamma : {0.5, 1.0, 5.0, 20.0}) {
    const auto e = physics::DecayModel::exponential(gamma, 1e-3);
    for (double t : {0.1, 0.5, 1.0}) {
      c.near(physics::survival_probability(e, t), std::exp(-gamma * t), 1e-12,
             "exp(-" + std::to_string(gamma * t) + ")");
    }
  }
  const std::vector<double> taus{1e-1, 1e-2, 1e-3, 1e-4};
  const auto curve = physics::zeno_limit_curve(1.0, 1.0, taus);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    // 1 - tau^2 loses ~1e-16 absolute in double, which the 1/tau-th power
    // amplifies to ~1e-12; the reference is taken in extended precision.
    const long double t2 = static_cast<long double>(taus[i]) * taus[i];
    const auto want = static_cast<double>(std::pow(1.0L - t2, std::round(1.0L / taus[i])));
    c.near(curve[i], want, 1e-12,
           "Zeno at tau=" + std::to_string(taus[i]));
    if (i > 0) c.that(curve[i] > curve[i - 1], "Zeno curve not increasing");
  }
  c.that(curve.back() < 1.0, "Zeno curve reached 1");
  return c;
}

Check oracle_equivalence() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(808);
  std::size_t widest = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const NetworkGraph g = testing::random_network(rng, {10, 8, 3});
    const Schedule s = compile(g);
    for (const auto& reg : s.registers) widest = std::max(widest, reg.size());
    const Labstate local = evaluate(s);
    Eigen::VectorXcd v = testing::to_dense(Labstate::basis(s.initial_rank(), dimension(s.initial_rank()) - 1));
    for (const auto& stage : s.stages) v = materialize(stage).matrix * v;
    c.near((testing::to_dense(local) - v).cwiseAbs().maxCoeff(), 0.0, 1e-12,
           "network " + std::to_string(trial));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.that(secs <= 30.0, "took " + std::to_string(secs) + " s");
  c.note = "widest register " + std::to_string(widest);
  return c;
}

NetworkGraph subgraph(const NetworkGraph& g, const std::set<std::string>& keep) {
  NetworkGraph out;
  for (const auto& n : g.sources()) {
    if (keep.contains(n)) out.add_source(n);
  }
  for (const auto& [n, decl] : g.modules()) {
    if (keep.contains(n)) out.add_module(n, decl.type, decl.params);
  }
  for (const auto& n : g.detectors()) {
    if (keep.contains(n)) out.add_detector(n);
  }
  for (const auto& w : g.wires()) {
    if (keep.contains(w.from.node) && keep.contains(w.to.node)) out.add_wire(w.from, w.to);
  }
  return out;
}

Check tensor_independence() {
  Check c;
  const NetworkGraph g = dsl::parse_file(kCorpus / "dual-stern-gerlach.qdn");
  const Schedule joint = compile(g);
  const Schedule s1 = compile(subgraph(g, {"S1", "SG1", "UP1", "DN1"}));
  const Schedule s2 = compile(subgraph(g, {"S2", "SG2", "UP2", "DN2"}));
  const Labstate fj = evaluate(joint), f1 = evaluate(s1), f2 = evaluate(s2);
  c.that(joint.final_rank() == s1.final_rank() + s2.final_rank(), "joint rank");
  for (BasisIndex k1 = 0; k1 < dimension(s1.final_rank()); ++k1) {
    for (BasisIndex k2 = 0; k2 < dimension(s2.final_rank()); ++k2) {
      auto fired = s1.fired_detectors(k1);
      const auto more = s2.fired_detectors(k2);
      fired.insert(fired.end(), more.begin(), more.end());
      const Amplitude want = f1.amplitude(k1) * f2.amplitude(k2);
      c.near(std::abs(fj.amplitude(joint.outcome_index(fired)) - want), 0.0, 1e-12, "joint amplitude");
    }
  }
  return c;
}

Check round_trip() {
  Check c;
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(kCorpus)) {
    if (entry.path().extension() != ".qdn") continue;
    ++files;
    const std::string name = entry.path().filename().string();
    const NetworkGraph g = dsl::parse_file(entry.path());
    const std::string text = dsl::serialize(g);
    c.that(dsl::parse(text) == g, name + ": parse(serialize(g)) != g");
    c.that(dsl::serialize(dsl::parse(text)) == text, name + ": serialize not idempotent");
  }
  c.that(files == 8, "expected 8 corpus files, found " + std::to_string(files));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"brandt POVM network", brandt},
      {"identity interferometer", identity_interferometer},
      {"Mach-Zehnder fringes", fringes},
      {"two-photon coincidences", hsz},
      {"signal algebra", signal_algebra},
      {"signal theorem", signal_theorem},
      {"decay", decay},
      {"local rules vs dense matrices", oracle_equivalence},
      {"tensor independence", tensor_independence},
      {"DSL round trip", round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, body] = criteria[i];
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      c = body();
    } catch (const std::exception& e) {
      c.failure = std::string("exception: ") + e.what();
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const bool ok = c.failure.empty();
    failed += !ok;
    const std::string extra = ok ? c.note : c.failure;
    std::printf("%-4s %2zu  %-30s max deviation %.3g  (%.0f ms)%s%s\n", ok ? "PASS" : "FAIL", i + 1, name,
                c.worst, ms, extra.empty() ? "" : "  ", extra.c_str());
  }
  return failed == 0 ? 0 : 1;
}
