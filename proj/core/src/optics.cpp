#include "qdn/optics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qdn/errors.hpp"

namespace qdn::optics {
namespace {

std::string describe(double value) {
  std::ostringstream os;
  os.precision(12);
  os << value;
  return os.str();
}

void require_near(double got, double want, const std::string& relation) {
  if (!std::isfinite(got) || std::abs(got - want) > kParamTolerance) {
    throw ParamError(relation + " violated (got " + describe(got) + ")");
  }
}

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw ParamError(std::string(name) + " must be finite");
}

}  // namespace

BeamSplitterParams symmetric_params() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {Amplitude{r, 0.0}, Amplitude{0.0, r}, Amplitude{0.0, r}, Amplitude{r, 0.0}};
}

ModuleAction beamsplitter(const BeamSplitterParams& p) {
  require_near(std::norm(p.alpha) + std::norm(p.beta), 1.0, "|alpha|^2+|beta|^2 = 1");
  require_near(std::norm(p.gamma) + std::norm(p.delta), 1.0, "|gamma|^2+|delta|^2 = 1");
  require_near(std::abs(std::conj(p.alpha) * p.gamma + std::conj(p.beta) * p.delta), 0.0,
               "alpha*gamma+beta*delta = 0");
  require_near(std::abs(p.two_signal_phase), 1.0, "|twosig| = 1");

  std::vector<ModuleAction::Row> rows;
  rows.emplace_back(Labstate::void_state(2));
  rows.emplace_back(Labstate(2, {{1, p.alpha}, {2, p.beta}}));
  rows.emplace_back(Labstate(2, {{1, p.gamma}, {2, p.delta}}));
  rows.emplace_back(Labstate(2, {{3, p.two_signal_phase}}));
  return ModuleAction("beamsplitter", 2, 2, std::move(rows));
}

double wollaston_constraint(const WollastonParams& p) {
  const Amplitude cross = std::conj(p.alpha_in) * p.beta_in + p.alpha_in * std::conj(p.beta_in);
  return std::norm(p.alpha_in) + std::norm(p.beta_in) + cross.real() * std::cos(p.theta);
}

ModuleAction wollaston(const WollastonParams& p) {
  require_finite(p.theta, "theta");
  if (std::abs(std::cos(p.theta) + 1.0) <= kParamTolerance) {
    throw ParamError("cos(theta) = -1 is excluded");
  }
  require_near(wollaston_constraint(p), 1.0,
               "|alpha|^2+|beta|^2+(alpha*beta+alpha beta*)cos(theta) = 1");
  const double c = std::cos(p.theta / 2);
  const double s = std::sin(p.theta / 2);
  std::vector<ModuleAction::Row> rows;
  rows.emplace_back(Labstate::void_state(2));
  rows.emplace_back(Labstate(2, {{1, (p.alpha_in + p.beta_in) * c}, {2, (p.alpha_in - p.beta_in) * s}}));
  return ModuleAction("wollaston", 1, 2, std::move(rows));
}

ModuleAction brandt_bs1(double theta) {
  require_finite(theta, "theta");
  if (theta < 0.0 || theta > std::numbers::pi / 2) {
    throw ParamError("brandt_bs theta must lie in [0, pi/2] so that tan^2(theta/2) <= 1 (got " +
                     describe(theta) + ")");
  }
  const double t = std::tan(theta / 2);
  const double transmit = std::sqrt(std::max(0.0, 1.0 - t * t));
  std::vector<ModuleAction::Row> rows;
  rows.emplace_back(Labstate::void_state(2));
  rows.emplace_back(Labstate(2, {{1, Amplitude{transmit, 0.0}}, {2, Amplitude{0.0, t}}}));
  return ModuleAction("brandt_bs", 1, 2, std::move(rows));
}

ModuleAction phase_element(const PhaseParams& p) {
  require_finite(p.phase, "phase");
  std::vector<ModuleAction::Row> rows;
  rows.emplace_back(Labstate::void_state(1));
  rows.emplace_back(Labstate(1, {{1, std::polar(1.0, p.phase)}}));
  return ModuleAction("phase", 1, 1, std::move(rows));
}

ModuleAction rotator() {
  // e^{i pi} evaluated exactly.
  std::vector<ModuleAction::Row> rows;
  rows.emplace_back(Labstate::void_state(1));
  rows.emplace_back(Labstate(1, {{1, Amplitude{-1.0, 0.0}}}));
  return ModuleAction("rotator", 1, 1, std::move(rows));
}

ModuleAction pair_source(const PairSourceParams& p) {
  require_finite(p.theta, "theta");
  const double r = 1.0 / std::numbers::sqrt2;
  constexpr BasisIndex kCE = 0b0101;
  constexpr BasisIndex kDF = 0b1010;
  std::vector<ModuleAction::Row> rows;
  rows.emplace_back(Labstate::void_state(4));
  rows.emplace_back(Labstate(4, {{kCE, Amplitude{r, 0.0}}, {kDF, std::polar(r, p.theta)}}));
  return ModuleAction("pairsource", 1, 4, std::move(rows));
}

ModuleAction wire() {
  std::vector<ModuleAction::Row> rows;
  rows.emplace_back(Labstate::void_state(1));
  rows.emplace_back(Labstate::basis(1, 1));
  return ModuleAction("wire", 1, 1, std::move(rows));
}

BeamSplitterParams adjoint(const BeamSplitterParams& p) {
  return {std::conj(p.alpha), std::conj(p.gamma), std::conj(p.beta), std::conj(p.delta),
          std::conj(p.two_signal_phase)};
}

}  // namespace qdn::optics
