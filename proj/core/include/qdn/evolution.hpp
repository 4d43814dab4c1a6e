#pragma once

// Born maps and semi-unitary stage operators.
//
// A stage takes a labstate of rank r_n to one of rank r_{n+1} >= r_n. Stages
// come in two forms: a dense 2^{r_{n+1}} x 2^{r_n} matrix, used for validation
// and small registers, and a list of local module actions applied key-by-key
// to a sparse state, which is how compiled networks run.

#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qdn/register.hpp"

namespace qdn {

/// Tolerance for column orthonormality of stage matrices and local maps.
inline constexpr double kSemiUnitaryTolerance = 1e-10;

/// Largest output rank for which a stage may be materialized densely.
inline constexpr Rank kMaxDenseRank = 14;

struct SemiUnitaryDense {
  Rank in_rank = 0;
  Rank out_rank = 0;
  Eigen::MatrixXcd matrix;  // U^{j,i}: row j = output basis, column i = input basis
};

struct SemiUnitarityReport {
  double max_deviation = 0.0;  // max |U^+U - I| entry
  bool accepted = false;
  bool square = false;
  double unitary_deviation = 0.0;  // max |UU^+ - I| entry, when square
  bool unitary = false;
};

/// Largest |(U^+U - I)_{ik}| for an arbitrary complex matrix.
double column_orthonormality_deviation(const Eigen::MatrixXcd& m);

SemiUnitarityReport check_semi_unitary(const SemiUnitaryDense& u);

/// Local rule of one module instance: the image of every local input basis
/// state as a labstate over the module's output qubits.
///
/// Local index bit j (0-based) is the occupancy of in_qubits[j]; likewise
/// for outputs. A row may be left undefined; applying the action to a state
/// that reaches it raises UndefinedTransitionError.
class ModuleAction {
 public:
  using Row = std::optional<Labstate>;

  /// Validates row count, row ranks and orthonormality of the defined rows;
  /// qubits default to 1..in_arity and 1..out_arity.
  ModuleAction(std::string label, unsigned in_arity, unsigned out_arity, std::vector<Row> rows);

  const std::string& label() const noexcept { return label_; }
  unsigned in_arity() const noexcept { return in_arity_; }
  unsigned out_arity() const noexcept { return out_arity_; }
  const std::vector<Rank>& in_qubits() const noexcept { return in_qubits_; }
  const std::vector<Rank>& out_qubits() const noexcept { return out_qubits_; }
  const Row& row(BasisIndex local) const { return rows_.at(local); }
  const std::vector<Row>& rows() const noexcept { return rows_; }

  /// Copy bound to register positions.
  ModuleAction placed(std::vector<Rank> in_qubits, std::vector<Rank> out_qubits) const;

  /// Copy whose unwired input ports are held in the void state. The result
  /// has one input per `true` entry of `wired`, in port order.
  ModuleAction restricted(const std::vector<bool>& wired) const;

  /// Copy with a new label.
  ModuleAction relabeled(std::string label) const;

  /// 2^out x 2^in matrix of the local map; undefined rows give zero columns.
  Eigen::MatrixXcd local_matrix() const;

  /// Maps local void to local void with unit modulus.
  bool isolated() const;

 private:
  std::string label_;
  unsigned in_arity_;
  unsigned out_arity_;
  std::vector<Row> rows_;
  std::vector<Rank> in_qubits_;
  std::vector<Rank> out_qubits_;
};

class StageMap {
 public:
  /// Dense stage; throws DimensionError unless the matrix is semi-unitary.
  static StageMap dense(SemiUnitaryDense u);
  /// Dense candidate without the semi-unitarity check (for validation tools).
  static StageMap dense_unchecked(SemiUnitaryDense u);
  /// Local-rule stage; the actions must partition both registers' qubits.
  static StageMap local(Rank in_rank, Rank out_rank, std::vector<ModuleAction> actions);

  Rank in_rank() const noexcept { return in_rank_; }
  Rank out_rank() const noexcept { return out_rank_; }

  bool is_dense() const noexcept { return std::holds_alternative<SemiUnitaryDense>(form_); }
  const SemiUnitaryDense& dense_form() const { return std::get<SemiUnitaryDense>(form_); }
  const std::vector<ModuleAction>& actions() const { return std::get<std::vector<ModuleAction>>(form_); }

 private:
  StageMap(Rank in_rank, Rank out_rank, std::variant<SemiUnitaryDense, std::vector<ModuleAction>> form)
      : in_rank_(in_rank), out_rank_(out_rank), form_(std::move(form)) {}

  Rank in_rank_;
  Rank out_rank_;
  std::variant<SemiUnitaryDense, std::vector<ModuleAction>> form_;
};

Labstate apply_stage(const StageMap& stage, const Labstate& s);

/// Dense matrix of a stage. Local-rule stages are expanded column by column
/// as Kronecker products of local images followed by a qubit permutation.
SemiUnitaryDense materialize(const StageMap& stage);

/// Applies the stages in order.
Labstate evolve(std::span<const StageMap> stages, const Labstate& initial);

/// Amplitude A(outcome, N | initial, M) of the fully evolved state.
Amplitude path_amplitude(std::span<const StageMap> stages, const Labstate& initial,
                         BasisIndex outcome);

struct SignalTheoremReport {
  bool accepted = true;
  /// Sources of the first offending pair (equal sources flag a bad norm).
  std::optional<std::pair<BasisIndex, BasisIndex>> offending;
  Amplitude overlap{};
  double max_deviation = 0.0;
};

/// Checks whether proposed images of distinct basis states could come from a
/// semi-unitary map, i.e. whether their Gram matrix is the identity.
SignalTheoremReport check_signal_theorem(const std::vector<std::pair<BasisIndex, Labstate>>& images);

/// True iff the stage is a valid Born map taking void to void up to a phase.
bool check_isolated(const StageMap& stage);

/// Non-linear Born map of switching an apparatus off: every state goes to void.
Labstate born_map_switch_off(const Labstate& s, Rank out_rank);

/// State reduction: samples a basis index with Born weights |Psi^k|^2, by
/// inverse-CDF over keys in ascending order.
BasisIndex born_map_reduce(const Labstate& s, std::mt19937_64& rng);

}  // namespace qdn
