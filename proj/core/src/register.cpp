#include "qdn/register.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qdn/errors.hpp"

namespace qdn {

std::string SourceLocation::to_string() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  out += ':' + std::to_string(line) + ':' + std::to_string(column);
  return out;
}

void require_rank(Rank rank) {
  if (rank > kMaxRank) {
    throw RankError("rank " + std::to_string(rank) + " exceeds the engine cap of " +
                    std::to_string(kMaxRank));
  }
}

BasisIndex dimension(Rank rank) {
  require_rank(rank);
  return BasisIndex{1} << rank;
}

Occupancy bit_decompose(BasisIndex k) {
  Occupancy out;
  out.minimum_rank = static_cast<Rank>(std::bit_width(k));
  out.digits.reserve(out.minimum_rank);
  for (Rank i = 1; i <= out.minimum_rank; ++i) out.digits.push_back(occupancy(k, i));
  return out;
}

unsigned signal_class(BasisIndex k) { return static_cast<unsigned>(std::popcount(k)); }

std::vector<std::uint64_t> signal_class_sizes(Rank rank) {
  require_rank(rank);
  // Pascal's rule; avoids enumerating 2^rank indices.
  std::vector<std::uint64_t> row{1};
  for (Rank r = 1; r <= rank; ++r) {
    std::vector<std::uint64_t> next(r + 1, 1);
    for (Rank k = 1; k < r; ++k) next[k] = row[k - 1] + row[k];
    row = std::move(next);
  }
  return row;
}

Labstate::Labstate(Rank rank) : rank_(rank) { require_rank(rank); }

Labstate::Labstate(Rank rank, std::initializer_list<std::pair<const BasisIndex, Amplitude>> terms)
    : Labstate(rank) {
  for (const auto& [k, a] : terms) add(k, a);
}

Labstate Labstate::basis(Rank rank, BasisIndex k) {
  Labstate s(rank);
  s.set(k, 1.0);
  return s;
}

void Labstate::check_key(BasisIndex k) const {
  if (rank_ < 64 && (k >> rank_) != 0) {
    throw RankError("basis index " + std::to_string(k) + " does not fit a rank-" +
                    std::to_string(rank_) + " register");
  }
}

Amplitude Labstate::amplitude(BasisIndex k) const {
  auto it = amplitudes_.find(k);
  return it == amplitudes_.end() ? Amplitude{} : it->second;
}

void Labstate::set(BasisIndex k, Amplitude a) {
  check_key(k);
  if (a == Amplitude{}) {
    amplitudes_.erase(k);
  } else {
    amplitudes_[k] = a;
  }
}

void Labstate::add(BasisIndex k, Amplitude a) {
  check_key(k);
  if (a == Amplitude{}) return;
  auto [it, inserted] = amplitudes_.try_emplace(k, a);
  if (!inserted) {
    it->second += a;
    if (it->second == Amplitude{}) amplitudes_.erase(it);
  }
}

void Labstate::prune(double threshold) {
  std::erase_if(amplitudes_, [threshold](const auto& kv) { return std::abs(kv.second) < threshold; });
}

double Labstate::norm_squared() const {
  double sum = 0.0;
  for (const auto& [k, a] : amplitudes_) sum += std::norm(a);
  return sum;
}

bool Labstate::is_normalized(double tolerance) const {
  return std::abs(norm_squared() - 1.0) <= tolerance;
}

Labstate Labstate::scaled(Amplitude factor) const {
  Labstate out(rank_);
  for (const auto& [k, a] : amplitudes_) out.set(k, a * factor);
  return out;
}

namespace {

void require_same_rank(const Labstate& a, const Labstate& b, const char* op) {
  if (a.rank() != b.rank()) {
    throw RankError(std::string(op) + ": rank mismatch (" + std::to_string(a.rank()) + " vs " +
                    std::to_string(b.rank()) + ")");
  }
}

}  // namespace

Amplitude inner_product(const Labstate& a, const Labstate& b) {
  require_same_rank(a, b, "inner_product");
  Amplitude sum{};
  // Both maps are ordered, so a merge walk touches each key once.
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += std::conj(ia->second) * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

Labstate add(const Labstate& a, const Labstate& b) {
  require_same_rank(a, b, "add");
  Labstate out = a;
  for (const auto& [k, v] : b) out.add(k, v);
  return out;
}

double max_abs_difference(const Labstate& a, const Labstate& b) {
  require_same_rank(a, b, "max_abs_difference");
  double worst = 0.0;
  for (const auto& [k, v] : a) worst = std::max(worst, std::abs(v - b.amplitude(k)));
  for (const auto& [k, v] : b) {
    if (!a.contains(k)) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

std::map<BasisIndex, double> born_probabilities(const Labstate& s) {
  if (!s.is_normalized()) {
    throw NormalizationError("born_probabilities: state has squared norm " +
                             std::to_string(s.norm_squared()));
  }
  std::map<BasisIndex, double> out;
  for (const auto& [k, a] : s) out.emplace_hint(out.end(), k, std::norm(a));
  return out;
}

MaximalAnswer maximal_question(const Labstate& s, BasisIndex k) {
  if (s.rank() < 64 && (k >> s.rank()) != 0) {
    throw RankError("maximal_question: index " + std::to_string(k) + " outside rank " +
                    std::to_string(s.rank()));
  }
  const Amplitude a = s.amplitude(k);
  return {a, std::norm(a)};
}

Labstate tensor(const Labstate& a, const Labstate& b) {
  const Rank rank = a.rank() + b.rank();
  require_rank(rank);
  Labstate out(rank);
  for (const auto& [kb, vb] : b) {
    const BasisIndex shifted = kb << a.rank();
    for (const auto& [ka, va] : a) out.set(ka | shifted, va * vb);
  }
  return out;
}

Labstate normalize(const Labstate& s) {
  const double n2 = s.norm_squared();
  if (!(n2 > 0.0)) throw ZeroNormError("normalize: zero state");
  return s.scaled(1.0 / std::sqrt(n2));
}

}  // namespace qdn
