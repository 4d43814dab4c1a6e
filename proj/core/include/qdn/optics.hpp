#pragma once

// Standard optical modules as local actions.
//
// Port order fixes the local basis: in-port j is local input bit j, out-port
// j is local output bit j. A two-port device therefore maps local |1) (port a
// fired) and |2) (port b fired) onto combinations of |1) (port c) and |2)
// (port d).

#include "qdn/evolution.hpp"

namespace qdn::optics {

/// Tolerance on the parameter relations of every builder.
inline constexpr double kParamTolerance = 1e-10;

struct BeamSplitterParams {
  Amplitude alpha;  // a -> c
  Amplitude beta;   // a -> d
  Amplitude gamma;  // b -> c
  Amplitude delta;  // b -> d
  Amplitude two_signal_phase{1.0, 0.0};
};

/// The fixed symmetric convention alpha = delta = 1/sqrt2, beta = gamma = i/sqrt2.
BeamSplitterParams symmetric_params();

/// Lossless beam splitter (also a Stern-Gerlach device), 2 in, 2 out.
ModuleAction beamsplitter(const BeamSplitterParams& p);

inline ModuleAction symmetric_beamsplitter() { return beamsplitter(symmetric_params()); }

struct WollastonParams {
  double theta;
  Amplitude alpha_in;
  Amplitude beta_in;
};

/// |alpha|^2 + |beta|^2 + (alpha* beta + alpha beta*) cos(theta), which must be 1.
double wollaston_constraint(const WollastonParams& p);

/// Wollaston prism of the POVM network, 1 in, 2 out.
ModuleAction wollaston(const WollastonParams& p);

/// Beam splitter tuned to the Wollaston prism: transmission
/// sqrt(1 - tan^2(theta/2)), reflection i tan(theta/2). 1 in, 2 out.
ModuleAction brandt_bs1(double theta);

struct PhaseParams {
  double phase;
};

/// |1) -> e^{i phase}|1). Mirrors and phase shifters are instances.
ModuleAction phase_element(const PhaseParams& p);

inline ModuleAction mirror(double phase) { return phase_element({phase}); }

/// Mirror plus 90 degree polarization rotation: fixed phase pi.
ModuleAction rotator();

struct PairSourceParams {
  double theta;
};

/// Entangled two-signal source, 1 in, 4 out (c, d, e, f):
/// |1) -> (|c e) + e^{i theta} |d f)) / sqrt2.
ModuleAction pair_source(const PairSourceParams& p);

/// Null test: carries a signal forward unchanged.
ModuleAction wire();

/// Relative orientation of the beam-splitter parameters that undoes `p` on
/// the one-signal subspace: (alpha*, gamma*, beta*, delta*).
BeamSplitterParams adjoint(const BeamSplitterParams& p);

}  // namespace qdn::optics
