#pragma once

// Signal operators A_i^+, A_i and the projectors P_i^0, P_i^1.
//
// Operators act key-by-key on sparse labstates. Dense matrices are only
// built by the small-rank verifier.

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdn/register.hpp"

namespace qdn {

enum class SignalOp { Create, Annihilate, Project0, Project1 };

/// One signal operator bound to a qubit (1-based).
struct SignalOperator {
  SignalOp kind;
  Rank qubit;
};

Labstate apply_create(Rank i, const Labstate& s);
Labstate apply_annihilate(Rank i, const Labstate& s);
Labstate apply_projector(Rank i, int value, const Labstate& s);
Labstate apply(const SignalOperator& op, const Labstate& s);

/// A_{i1}^+ ... A_{ik}^+ |0) for the given qubit set.
Labstate monomial_state(const std::vector<Rank>& qubits, Rank rank);

/// Transition terms |to)(from| of the computation-basis representation of
/// A_i^+ at the given rank, in ascending order of `from`.
std::vector<std::pair<BasisIndex, BasisIndex>> create_transitions(Rank i, Rank rank);

/// Dense 2^r x 2^r matrix of A_i^+ (the annihilator is its adjoint).
Eigen::MatrixXd dense_create(Rank i, Rank rank);

struct SignalAlgebraReport {
  Rank rank = 0;
  /// Largest |entry| of any relation that must vanish.
  double max_deviation = 0.0;
  /// Number of unordered qubit pairs i < j whose cross relations were checked.
  unsigned pairs_checked = 0;
  /// Transition terms found in each A_i^+ (expected 2^{r-1}).
  std::vector<std::size_t> transitions_per_qubit;
  bool passed = false;
};

/// Brute-force check of nilpotency, {A_i, A_i^+} = I and the vanishing of all
/// cross commutators, for rank <= 5.
SignalAlgebraReport verify_signal_algebra(Rank rank);

}  // namespace qdn
