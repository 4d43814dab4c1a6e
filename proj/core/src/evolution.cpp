#include "qdn/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qdn/errors.hpp"

namespace qdn {
namespace {

constexpr unsigned kMaxLocalArity = 16;

std::vector<Rank> iota_qubits(unsigned n) {
  std::vector<Rank> q(n);
  std::iota(q.begin(), q.end(), Rank{1});
  return q;
}

// Gathers the occupancies at `qubits` into a packed local index.
BasisIndex gather(BasisIndex k, const std::vector<Rank>& qubits) {
  BasisIndex local = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    local |= ((k >> (qubits[j] - 1)) & 1u) << j;
  }
  return local;
}

// Inverse of gather.
BasisIndex scatter(BasisIndex local, const std::vector<Rank>& qubits) {
  BasisIndex k = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    k |= ((local >> j) & 1u) << (qubits[j] - 1);
  }
  return k;
}

void check_partition(const std::vector<ModuleAction>& actions, Rank rank, bool inputs) {
  std::vector<int> seen(rank + 1, 0);
  for (const auto& action : actions) {
    for (Rank q : inputs ? action.in_qubits() : action.out_qubits()) {
      if (q < 1 || q > rank) {
        throw RankError("stage: action '" + action.label() + "' uses qubit " + std::to_string(q) +
                        " outside 1.." + std::to_string(rank));
      }
      if (seen[q]++) {
        throw RankError("stage: qubit " + std::to_string(q) + " claimed by more than one " +
                        (inputs ? "input" : "output") + " set");
      }
    }
  }
  for (Rank q = 1; q <= rank; ++q) {
    if (!seen[q]) {
      throw RankError("stage: " + std::string(inputs ? "input" : "output") + " qubit " +
                      std::to_string(q) + " is not covered by any action");
    }
  }
}

}  // namespace

double column_orthonormality_deviation(const Eigen::MatrixXcd& m) {
  if (m.cols() == 0) return 0.0;
  const Eigen::MatrixXcd gram = m.adjoint() * m;
  return (gram - Eigen::MatrixXcd::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

SemiUnitarityReport check_semi_unitary(const SemiUnitaryDense& u) {
  if (u.in_rank > u.out_rank) {
    throw DimensionError("no semi-unitary map exists from rank " + std::to_string(u.in_rank) +
                         " to the smaller rank " + std::to_string(u.out_rank));
  }
  if (static_cast<BasisIndex>(u.matrix.rows()) != dimension(u.out_rank) ||
      static_cast<BasisIndex>(u.matrix.cols()) != dimension(u.in_rank)) {
    throw DimensionError("matrix shape " + std::to_string(u.matrix.rows()) + "x" +
                         std::to_string(u.matrix.cols()) + " does not match ranks " +
                         std::to_string(u.out_rank) + " <- " + std::to_string(u.in_rank));
  }
  SemiUnitarityReport report;
  report.max_deviation = column_orthonormality_deviation(u.matrix);
  report.accepted = report.max_deviation <= kSemiUnitaryTolerance;
  report.square = u.in_rank == u.out_rank;
  if (report.square) {
    const Eigen::MatrixXcd outer = u.matrix * u.matrix.adjoint();
    report.unitary_deviation =
        (outer - Eigen::MatrixXcd::Identity(u.matrix.rows(), u.matrix.rows())).cwiseAbs().maxCoeff();
    report.unitary = report.accepted && report.unitary_deviation <= kSemiUnitaryTolerance;
  }
  return report;
}

// ---------------------------------------------------------------------------
// ModuleAction

ModuleAction::ModuleAction(std::string label, unsigned in_arity, unsigned out_arity,
                           std::vector<Row> rows)
    : label_(std::move(label)),
      in_arity_(in_arity),
      out_arity_(out_arity),
      rows_(std::move(rows)),
      in_qubits_(iota_qubits(in_arity)),
      out_qubits_(iota_qubits(out_arity)) {
  if (in_arity > kMaxLocalArity || out_arity > kMaxLocalArity) {
    throw ParamError("module '" + label_ + "': local arity exceeds " +
                     std::to_string(kMaxLocalArity));
  }
  if (rows_.size() != dimension(in_arity)) {
    throw ParamError("module '" + label_ + "': expected " + std::to_string(dimension(in_arity)) +
                     " local rows, got " + std::to_string(rows_.size()));
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i] && rows_[i]->rank() != out_arity) {
      throw ParamError("module '" + label_ + "': row " + std::to_string(i) + " has rank " +
                       std::to_string(rows_[i]->rank()) + ", expected " + std::to_string(out_arity));
    }
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!rows_[i]) continue;
    for (std::size_t j = i; j < rows_.size(); ++j) {
      if (!rows_[j]) continue;
      const Amplitude expected = i == j ? 1.0 : 0.0;
      const Amplitude got = inner_product(*rows_[i], *rows_[j]);
      if (std::abs(got - expected) > kSemiUnitaryTolerance) {
        throw ParamError("module '" + label_ + "': local images of |" + std::to_string(i) +
                         ") and |" + std::to_string(j) + ") are not orthonormal (overlap " +
                         std::to_string(std::abs(got)) + ")");
      }
    }
  }
}

ModuleAction ModuleAction::placed(std::vector<Rank> in_qubits, std::vector<Rank> out_qubits) const {
  if (in_qubits.size() != in_arity_ || out_qubits.size() != out_arity_) {
    throw RankError("module '" + label_ + "': placement arity mismatch");
  }
  ModuleAction out = *this;
  out.in_qubits_ = std::move(in_qubits);
  out.out_qubits_ = std::move(out_qubits);
  return out;
}

ModuleAction ModuleAction::restricted(const std::vector<bool>& wired) const {
  if (wired.size() != in_arity_) throw RankError("module '" + label_ + "': restriction arity mismatch");
  std::vector<Rank> kept;
  for (unsigned j = 0; j < in_arity_; ++j) {
    if (wired[j]) kept.push_back(j + 1);
  }
  std::vector<Row> rows;
  rows.reserve(dimension(static_cast<Rank>(kept.size())));
  for (BasisIndex m = 0; m < dimension(static_cast<Rank>(kept.size())); ++m) {
    rows.push_back(rows_[scatter(m, kept)]);
  }
  return ModuleAction(label_, static_cast<unsigned>(kept.size()), out_arity_, std::move(rows));
}

ModuleAction ModuleAction::relabeled(std::string label) const {
  ModuleAction out = *this;
  out.label_ = std::move(label);
  return out;
}

Eigen::MatrixXcd ModuleAction::local_matrix() const {
  const auto rows = static_cast<Eigen::Index>(dimension(out_arity_));
  const auto cols = static_cast<Eigen::Index>(dimension(in_arity_));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    if (!rows_[static_cast<std::size_t>(i)]) continue;
    for (const auto& [k, a] : *rows_[static_cast<std::size_t>(i)]) m(static_cast<Eigen::Index>(k), i) = a;
  }
  return m;
}

bool ModuleAction::isolated() const {
  if (!rows_[0]) return false;
  return std::abs(std::abs(rows_[0]->amplitude(0)) - 1.0) <= kSemiUnitaryTolerance;
}

// ---------------------------------------------------------------------------
// StageMap

StageMap StageMap::dense(SemiUnitaryDense u) {
  const auto report = check_semi_unitary(u);
  if (!report.accepted) {
    throw DimensionError("stage matrix is not semi-unitary (max |U^+U - I| = " +
                         std::to_string(report.max_deviation) + ")");
  }
  return dense_unchecked(std::move(u));
}

StageMap StageMap::dense_unchecked(SemiUnitaryDense u) {
  if (static_cast<BasisIndex>(u.matrix.rows()) != dimension(u.out_rank) ||
      static_cast<BasisIndex>(u.matrix.cols()) != dimension(u.in_rank)) {
    throw DimensionError("stage matrix shape does not match its ranks");
  }
  const Rank in = u.in_rank;
  const Rank out = u.out_rank;
  return StageMap(in, out, std::move(u));
}

StageMap StageMap::local(Rank in_rank, Rank out_rank, std::vector<ModuleAction> actions) {
  require_rank(in_rank);
  require_rank(out_rank);
  check_partition(actions, in_rank, true);
  check_partition(actions, out_rank, false);
  return StageMap(in_rank, out_rank, std::move(actions));
}

namespace {

struct CompiledAction {
  const ModuleAction* action;
  // Rows with output indices already scattered into the global register.
  std::vector<std::optional<std::vector<std::pair<BasisIndex, Amplitude>>>> rows;
};

std::vector<CompiledAction> compile_actions(const std::vector<ModuleAction>& actions) {
  std::vector<CompiledAction> out;
  out.reserve(actions.size());
  for (const auto& action : actions) {
    CompiledAction c{&action, {}};
    c.rows.reserve(action.rows().size());
    for (const auto& row : action.rows()) {
      if (!row) {
        c.rows.emplace_back(std::nullopt);
        continue;
      }
      std::vector<std::pair<BasisIndex, Amplitude>> terms;
      terms.reserve(row->size());
      for (const auto& [k, a] : *row) terms.emplace_back(scatter(k, action.out_qubits()), a);
      c.rows.emplace_back(std::move(terms));
    }
    out.push_back(std::move(c));
  }
  return out;
}

Labstate apply_local(const StageMap& stage, const Labstate& s) {
  const auto compiled = compile_actions(stage.actions());
  Labstate out(stage.out_rank());
  std::vector<std::pair<BasisIndex, Amplitude>> partial;
  std::vector<std::pair<BasisIndex, Amplitude>> next;
  for (const auto& [k, a] : s) {
    partial.assign(1, {BasisIndex{0}, a});
    for (const auto& c : compiled) {
      const BasisIndex local = gather(k, c.action->in_qubits());
      const auto& row = c.rows[local];
      if (!row) {
        throw UndefinedTransitionError("module '" + c.action->label() +
                                       "' has no rule for local input |" + std::to_string(local) +
                                       ")");
      }
      next.clear();
      next.reserve(partial.size() * row->size());
      for (const auto& [pk, pa] : partial) {
        for (const auto& [rk, ra] : *row) next.emplace_back(pk | rk, pa * ra);
      }
      partial.swap(next);
      if (partial.empty()) break;
    }
    for (const auto& [pk, pa] : partial) out.add(pk, pa);
  }
  return out;
}

Labstate apply_dense(const SemiUnitaryDense& u, const Labstate& s) {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(u.matrix.rows());
  for (const auto& [k, a] : s) acc += u.matrix.col(static_cast<Eigen::Index>(k)) * a;
  Labstate out(u.out_rank);
  for (Eigen::Index j = 0; j < acc.size(); ++j) out.set(static_cast<BasisIndex>(j), acc(j));
  return out;
}

}  // namespace

Labstate apply_stage(const StageMap& stage, const Labstate& s) {
  if (s.rank() != stage.in_rank()) {
    throw RankError("apply_stage: state rank " + std::to_string(s.rank()) +
                    " does not match stage input rank " + std::to_string(stage.in_rank()));
  }
  return stage.is_dense() ? apply_dense(stage.dense_form(), s) : apply_local(stage, s);
}

SemiUnitaryDense materialize(const StageMap& stage) {
  if (stage.is_dense()) return stage.dense_form();
  if (stage.out_rank() > kMaxDenseRank) {
    throw RankError("materialize: output rank " + std::to_string(stage.out_rank()) +
                    " exceeds the dense cap of " + std::to_string(kMaxDenseRank));
  }
  const auto& actions = stage.actions();

  // Concatenated local layout: outputs of action 0 first, then action 1, ...
  std::vector<Rank> layout;
  for (const auto& action : actions) {
    layout.insert(layout.end(), action.out_qubits().begin(), action.out_qubits().end());
  }
  const BasisIndex out_dim = dimension(stage.out_rank());
  std::vector<BasisIndex> permutation(out_dim);
  for (BasisIndex l = 0; l < out_dim; ++l) permutation[l] = scatter(l, layout);

  std::vector<Eigen::MatrixXcd> local;
  local.reserve(actions.size());
  for (const auto& action : actions) local.push_back(action.local_matrix());

  SemiUnitaryDense u{stage.in_rank(), stage.out_rank(),
                     Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(out_dim),
                                            static_cast<Eigen::Index>(dimension(stage.in_rank())))};
  Eigen::VectorXcd column;
  Eigen::VectorXcd grown;
  for (BasisIndex i = 0; i < dimension(stage.in_rank()); ++i) {
    column = Eigen::VectorXcd::Ones(1);
    for (std::size_t n = 0; n < actions.size(); ++n) {
      const BasisIndex in_local = gather(i, actions[n].in_qubits());
      if (!actions[n].row(in_local)) {
        throw UndefinedTransitionError("module '" + actions[n].label() +
                                       "' has no rule for local input |" + std::to_string(in_local) +
                                       ")");
      }
      const Eigen::VectorXcd v = local[n].col(static_cast<Eigen::Index>(in_local));
      // Kronecker product with the new factor in the high-order position.
      grown.resize(column.size() * v.size());
      for (Eigen::Index m = 0; m < v.size(); ++m) grown.segment(m * column.size(), column.size()) = column * v(m);
      column.swap(grown);
    }
    for (Eigen::Index l = 0; l < column.size(); ++l) {
      u.matrix(static_cast<Eigen::Index>(permutation[static_cast<BasisIndex>(l)]),
               static_cast<Eigen::Index>(i)) = column(l);
    }
  }
  return u;
}

Labstate evolve(std::span<const StageMap> stages, const Labstate& initial) {
  Labstate state = initial;
  for (std::size_t n = 0; n < stages.size(); ++n) {
    if (stages[n].in_rank() != state.rank()) {
      throw RankError("stage " + std::to_string(n + 1) + " expects rank " +
                      std::to_string(stages[n].in_rank()) + " but the chain delivers rank " +
                      std::to_string(state.rank()));
    }
    state = apply_stage(stages[n], state);
  }
  return state;
}

Amplitude path_amplitude(std::span<const StageMap> stages, const Labstate& initial,
                         BasisIndex outcome) {
  const Labstate final_state = evolve(stages, initial);
  return maximal_question(final_state, outcome).amplitude;
}

SignalTheoremReport check_signal_theorem(const std::vector<std::pair<BasisIndex, Labstate>>& images) {
  SignalTheoremReport report;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      if (images[i].first == images[j].first) {
        throw ParamError("check_signal_theorem: source |" + std::to_string(images[i].first) +
                         ") listed twice");
      }
      if (images[i].second.rank() != images[j].second.rank()) {
        throw RankError("check_signal_theorem: images have different target ranks");
      }
    }
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i; j < images.size(); ++j) {
      const Amplitude expected = i == j ? 1.0 : 0.0;
      const Amplitude got = inner_product(images[i].second, images[j].second);
      const double deviation = std::abs(got - expected);
      report.max_deviation = std::max(report.max_deviation, deviation);
      if (deviation > kSemiUnitaryTolerance && report.accepted) {
        report.accepted = false;
        report.offending = std::make_pair(images[i].first, images[j].first);
        report.overlap = got;
      }
    }
  }
  return report;
}

bool check_isolated(const StageMap& stage) {
  if (stage.is_dense()) {
    const auto report = check_semi_unitary(stage.dense_form());
    if (!report.accepted) return false;
  }
  const Labstate image = apply_stage(stage, Labstate::void_state(stage.in_rank()));
  return std::abs(image.norm_squared() - 1.0) <= kSemiUnitaryTolerance &&
         std::abs(std::abs(image.amplitude(0)) - 1.0) <= kSemiUnitaryTolerance;
}

Labstate born_map_switch_off(const Labstate&, Rank out_rank) { return Labstate::void_state(out_rank); }

BasisIndex born_map_reduce(const Labstate& s, std::mt19937_64& rng) {
  if (!s.is_normalized()) {
    throw NormalizationError("born_map_reduce: state has squared norm " +
                             std::to_string(s.norm_squared()));
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double cumulative = 0.0;
  for (const auto& [k, a] : s) {
    cumulative += std::norm(a);
    if (u < cumulative) return k;
  }
  // Rounding can leave the total a hair under u.
  return std::prev(s.end())->first;
}

}  // namespace qdn
