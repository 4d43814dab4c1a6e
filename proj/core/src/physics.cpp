#include "qdn/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdn/errors.hpp"

namespace qdn::physics {
namespace {

void require_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ParamError("tau must be positive and finite");
}

std::string fmt(double x) { return std::to_string(x); }

}  // namespace

DecayModel::DecayModel(DecayRegime regime, Amplitude alpha, double tau, double rate, double log_survival)
    : regime_(regime),
      alpha_(alpha),
      beta_(std::sqrt(std::max(0.0, 1.0 - std::norm(alpha)))),
      tau_(tau),
      rate_(rate),
      log_survival_(log_survival) {}

DecayModel DecayModel::explicit_alpha(Amplitude alpha, double tau) {
  require_tau(tau);
  const double a2 = std::norm(alpha);
  if (!std::isfinite(a2) || a2 > 1.0 + kNormTolerance) {
    throw ParamError("|alpha| must not exceed 1 (got |alpha|^2 = " + fmt(a2) + ")");
  }
  if (a2 > 1.0) alpha /= std::sqrt(a2);
  const double log_s = a2 == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::min(a2, 1.0));
  return DecayModel(DecayRegime::ExplicitAlpha, alpha, tau, 0.0, log_s);
}

DecayModel DecayModel::exponential(double gamma, double tau) {
  require_tau(tau);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParamError("Gamma must be non-negative");
  return DecayModel(DecayRegime::Exponential, std::exp(-0.5 * gamma * tau), tau, gamma, -gamma * tau);
}

DecayModel DecayModel::zeno(double gamma, double tau) {
  require_tau(tau);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParamError("gamma must be non-negative");
  const double g = gamma * tau * tau;
  if (!(g < 1.0)) throw ParamError("Zeno regime requires gamma*tau^2 < 1 (got " + fmt(g) + ")");
  return DecayModel(DecayRegime::Zeno, std::sqrt(1.0 - g), tau, gamma, std::log1p(-g));
}

double DecayModel::survival_after(std::uint64_t n) const {
  if (n == 0) return 1.0;
  return std::exp(static_cast<double>(n) * log_survival_);
}

DecayAmplitudes decay_amplitudes(const DecayModel& m, std::uint64_t n) {
  DecayAmplitudes out{Amplitude{1.0, 0.0}, {}};
  out.y.reserve(n);
  for (std::uint64_t k = 1; k <= n; ++k) {
    out.y.push_back(m.beta() * out.x);
    out.x *= m.alpha();
  }
  return out;
}

Labstate decay_state(const DecayModel& m, unsigned n) {
  if (n + 1 > kMaxRank) {
    throw RankError("decay_state needs rank " + std::to_string(n + 1) + ", above the cap of " +
                    std::to_string(kMaxRank));
  }
  const auto amps = decay_amplitudes(m, n);
  Labstate s(n + 1);
  s.set(BasisIndex{1}, amps.x);
  for (unsigned k = 1; k <= n; ++k) s.set(BasisIndex{1} << k, amps.y[k - 1]);
  return s;
}

StageMap decay_stage(const DecayModel& m, unsigned n) {
  if (n + 2 > kMaxRank) throw RankError("decay_stage output rank exceeds the register cap");
  // Local outputs: bit 0 = X (qubit 1), bit 1 = Y_{n+1} (qubit n+2).
  std::vector<ModuleAction::Row> rows;
  rows.emplace_back(Labstate::basis(2, 0));
  rows.emplace_back(Labstate(2, {{BasisIndex{1}, m.alpha()}, {BasisIndex{2}, Amplitude{m.beta(), 0.0}}}));
  std::vector<ModuleAction> actions;
  actions.push_back(ModuleAction("decay", 1, 2, std::move(rows)).placed({1}, {1, n + 2}));
  for (Rank q = 2; q <= n + 1; ++q) {
    std::vector<ModuleAction::Row> id;
    id.emplace_back(Labstate::basis(1, 0));
    id.emplace_back(Labstate::basis(1, 1));
    actions.push_back(ModuleAction("wire", 1, 1, std::move(id)).placed({q}, {q}));
  }
  return StageMap::local(n + 1, n + 2, std::move(actions));
}

StepSnap snap_steps(double t, double tau) {
  require_tau(tau);
  if (!(t >= 0.0) || !std::isfinite(t)) throw ParamError("time must be non-negative and finite");
  const double ratio = t / tau;
  const double n = std::round(ratio);
  if (n > 9.0e18) throw ParamError("t/tau is too large");
  return {static_cast<std::uint64_t>(n), std::abs(ratio - n) > 1e-9};
}

double survival_probability(const DecayModel& m, double t) {
  return m.survival_after(snap_steps(t, m.tau()).steps);
}

std::vector<double> zeno_limit_curve(double gamma, double t, const std::vector<double>& taus) {
  std::vector<double> out;
  out.reserve(taus.size());
  for (double tau : taus) out.push_back(survival_probability(DecayModel::zeno(gamma, tau), t));
  return out;
}

double lorentz_factor(double v, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParamError("c must be positive");
  if (!(std::abs(v) < c)) throw ParamError("|v| must be below c");
  const double beta = v / c;
  return 1.0 / std::sqrt(1.0 - beta * beta);
}

SpacetimeEvent lorentz_transform(const SpacetimeEvent& e, double v, double c, std::string frame) {
  const double g = lorentz_factor(v, c);
  return {g * (e.t - v * e.x / (c * c)), g * (e.x - v * e.t), std::move(frame)};
}

QuantumHorizon quantum_horizon(double v, double t_prime, double c) {
  if (v == 0.0) throw ParamError("v = 0: the horizon event is at spatial infinity");
  if (!(t_prime > 0.0)) throw ParamError("T' must be positive");
  const double g = lorentz_factor(v, c);
  QuantumHorizon h;
  h.in_f = {0.0, -c * c * t_prime / (g * v), "F"};
  h.in_f_prime = {t_prime, -c * c * t_prime / v, "F'"};
  const SpacetimeEvent check = lorentz_transform(h.in_f, v, c);
  const double dt = std::abs(check.t - h.in_f_prime.t) / std::max(1.0, std::abs(h.in_f_prime.t));
  const double dx = std::abs(check.x - h.in_f_prime.x) / std::max(1.0, std::abs(h.in_f_prime.x));
  h.residual = std::max(dt, dx);
  return h;
}

}  // namespace qdn::physics
