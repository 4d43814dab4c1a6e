#pragma once

// One-signal particle decay over a growing register, and the two-frame
// relativity helpers used for the quantum-horizon event.

#include <cstdint>
#include <string>
#include <vector>

#include "qdn/evolution.hpp"
#include "qdn/register.hpp"

namespace qdn::physics {

enum class DecayRegime { ExplicitAlpha, Exponential, Zeno };

/// Per-step survival amplitude alpha and step length tau. The decay
/// amplitude beta is taken real and non-negative.
class DecayModel {
 public:
  /// |alpha| <= 1, tau > 0.
  static DecayModel explicit_alpha(Amplitude alpha, double tau = 1.0);
  /// |alpha|^2 = exp(-Gamma tau).
  static DecayModel exponential(double gamma, double tau);
  /// |alpha|^2 = 1 - gamma tau^2; requires gamma tau^2 < 1.
  static DecayModel zeno(double gamma, double tau);

  DecayRegime regime() const noexcept { return regime_; }
  Amplitude alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double tau() const noexcept { return tau_; }
  /// Gamma (exponential) or gamma (Zeno); zero for an explicit alpha.
  double rate() const noexcept { return rate_; }

  /// |alpha|^{2n}, evaluated as exp(n log|alpha|^2) with the log taken
  /// in closed form per regime.
  double survival_after(std::uint64_t n) const;

 private:
  DecayModel(DecayRegime regime, Amplitude alpha, double tau, double rate, double log_survival);

  DecayRegime regime_;
  Amplitude alpha_;
  double beta_;
  double tau_;
  double rate_;
  double log_survival_;  // log |alpha|^2, -inf when alpha = 0
};

/// Amplitudes after n steps: x on the undecayed qubit, y[k-1] on Y_k.
struct DecayAmplitudes {
  Amplitude x;
  std::vector<Amplitude> y;
};

/// Valid for any n; the register is never materialized.
DecayAmplitudes decay_amplitudes(const DecayModel& m, std::uint64_t n);

/// Rank n+1 labstate: qubit 1 is X, qubit k+1 is Y_k. Throws RankError past
/// the register cap.
Labstate decay_state(const DecayModel& m, unsigned n);

/// Stage from step n to step n+1 (rank n+1 to n+2): X splits into X and the
/// new Y_{n+1}; earlier Y qubits persist.
StageMap decay_stage(const DecayModel& m, unsigned n);

struct StepSnap {
  std::uint64_t steps;
  bool off_grid;  // t/tau was more than 1e-9 away from an integer
};

/// Nearest step count to t/tau; throws ParamError for negative t.
StepSnap snap_steps(double t, double tau);

/// Survival after time t, with t snapped to the step grid.
double survival_probability(const DecayModel& m, double t);

/// Zeno-regime survival at time t for each step length in `taus`.
std::vector<double> zeno_limit_curve(double gamma, double t, const std::vector<double>& taus);

struct SpacetimeEvent {
  double t = 0.0;
  double x = 0.0;
  std::string frame = "F";
};

/// gamma(v) = 1/sqrt(1 - v^2/c^2); throws ParamError unless |v| < c.
double lorentz_factor(double v, double c);

/// Coordinates in the frame moving with velocity v relative to e.frame.
SpacetimeEvent lorentz_transform(const SpacetimeEvent& e, double v, double c, std::string frame = "F'");

struct QuantumHorizon {
  SpacetimeEvent in_f;
  SpacetimeEvent in_f_prime;
  /// Largest coordinate difference between the transformed F event and
  /// in_f_prime, relative to the coordinate magnitude (x grows like c^2/v).
  double residual = 0.0;
};

/// Intersection of F's t = 0 hyperplane with F' 's t' = T' hyperplane.
/// Requires 0 < |v| < c and T' > 0.
QuantumHorizon quantum_horizon(double v, double t_prime, double c);

}  // namespace qdn::physics
