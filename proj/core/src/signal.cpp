#include "qdn/signal.hpp"

#include <algorithm>
#include <string>

#include "qdn/errors.hpp"

namespace qdn {
namespace {

void require_qubit(Rank i, Rank rank, const char* op) {
  if (i < 1 || i > rank) {
    throw RankError(std::string(op) + ": qubit " + std::to_string(i) + " outside 1.." +
                    std::to_string(rank));
  }
}

}  // namespace

Labstate apply_create(Rank i, const Labstate& s) {
  require_qubit(i, s.rank(), "apply_create");
  const BasisIndex bit = BasisIndex{1} << (i - 1);
  Labstate out(s.rank());
  for (const auto& [k, a] : s) {
    if ((k & bit) == 0) out.set(k | bit, a);
  }
  return out;
}

Labstate apply_annihilate(Rank i, const Labstate& s) {
  require_qubit(i, s.rank(), "apply_annihilate");
  const BasisIndex bit = BasisIndex{1} << (i - 1);
  Labstate out(s.rank());
  for (const auto& [k, a] : s) {
    if ((k & bit) != 0) out.set(k & ~bit, a);
  }
  return out;
}

Labstate apply_projector(Rank i, int value, const Labstate& s) {
  require_qubit(i, s.rank(), "apply_projector");
  if (value != 0 && value != 1) throw ParamError("apply_projector: value must be 0 or 1");
  Labstate out(s.rank());
  for (const auto& [k, a] : s) {
    if (occupancy(k, i) == value) out.set(k, a);
  }
  return out;
}

Labstate apply(const SignalOperator& op, const Labstate& s) {
  switch (op.kind) {
    case SignalOp::Create: return apply_create(op.qubit, s);
    case SignalOp::Annihilate: return apply_annihilate(op.qubit, s);
    case SignalOp::Project0: return apply_projector(op.qubit, 0, s);
    case SignalOp::Project1: return apply_projector(op.qubit, 1, s);
  }
  throw ParamError("apply: unknown signal operator");
}

Labstate monomial_state(const std::vector<Rank>& qubits, Rank rank) {
  require_rank(rank);
  BasisIndex k = 0;
  for (Rank i : qubits) {
    require_qubit(i, rank, "monomial_state");
    const BasisIndex bit = BasisIndex{1} << (i - 1);
    if (k & bit) {
      throw NilpotencyError("monomial_state: qubit " + std::to_string(i) +
                            " repeated; A_i^+ A_i^+ = 0");
    }
    k |= bit;
  }
  return Labstate::basis(rank, k);
}

std::vector<std::pair<BasisIndex, BasisIndex>> create_transitions(Rank i, Rank rank) {
  require_qubit(i, rank, "create_transitions");
  const BasisIndex bit = BasisIndex{1} << (i - 1);
  std::vector<std::pair<BasisIndex, BasisIndex>> out;
  for (BasisIndex k = 0; k < dimension(rank); ++k) {
    if ((k & bit) == 0) out.emplace_back(k + bit, k);
  }
  return out;
}

Eigen::MatrixXd dense_create(Rank i, Rank rank) {
  const auto dim = static_cast<Eigen::Index>(dimension(rank));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [to, from] : create_transitions(i, rank)) {
    m(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) = 1.0;
  }
  return m;
}

SignalAlgebraReport verify_signal_algebra(Rank rank) {
  if (rank < 1 || rank > 5) {
    throw RankError("verify_signal_algebra: rank must be in 1..5, got " + std::to_string(rank));
  }
  SignalAlgebraReport report;
  report.rank = rank;

  const auto dim = static_cast<Eigen::Index>(dimension(rank));
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(dim, dim);
  std::vector<Eigen::MatrixXd> create(rank + 1);
  std::vector<Eigen::MatrixXd> annihilate(rank + 1);
  for (Rank i = 1; i <= rank; ++i) {
    create[i] = dense_create(i, rank);
    annihilate[i] = create[i].transpose();
    report.transitions_per_qubit.push_back(
        static_cast<std::size_t>((create[i].array() != 0.0).count()));
  }

  auto record = [&report](const Eigen::MatrixXd& m) {
    report.max_deviation = std::max(report.max_deviation, m.cwiseAbs().maxCoeff());
  };

  for (Rank i = 1; i <= rank; ++i) {
    record(annihilate[i] * annihilate[i]);
    record(create[i] * create[i]);
    record(annihilate[i] * create[i] + create[i] * annihilate[i] - identity);
    for (Rank j = i + 1; j <= rank; ++j) {
      record(create[i] * create[j] - create[j] * create[i]);
      record(annihilate[i] * annihilate[j] - annihilate[j] * annihilate[i]);
      record(annihilate[i] * create[j] - create[j] * annihilate[i]);
      record(create[i] * annihilate[j] - annihilate[j] * create[i]);
      ++report.pairs_checked;
    }
  }
  report.passed = report.max_deviation == 0.0;
  return report;
}

}  // namespace qdn
