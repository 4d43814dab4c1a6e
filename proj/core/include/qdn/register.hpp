#pragma once

// Quantum registers: basis indexing, sparse labstates and the Born rule.
//
// A register of rank r holds one qubit per elementary signal detector. Basis
// state |k) has occupancy e_i of detector i equal to binary digit i of k
// (1-indexed, least significant first), so k = sum_i e_i 2^{i-1}.

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <utility>
#include <vector>

namespace qdn {

using Amplitude = std::complex<double>;
using BasisIndex = std::uint64_t;
using Rank = unsigned;

/// Largest register rank the engine will address; 2^62 still fits a BasisIndex.
inline constexpr Rank kMaxRank = 62;

/// Tolerance on sum |amplitude|^2 for a state to count as normalized.
inline constexpr double kNormTolerance = 1e-12;

/// Checks rank <= kMaxRank, throwing RankError otherwise.
void require_rank(Rank rank);

/// Number of basis states of a register of the given rank.
BasisIndex dimension(Rank rank);

struct Occupancy {
  std::vector<int> digits;  // e_1 .. e_p
  Rank minimum_rank = 0;    // p: position of the highest set digit
};

Occupancy bit_decompose(BasisIndex k);

/// Occupancy digit i (1-based) of k.
inline int occupancy(BasisIndex k, Rank i) { return static_cast<int>((k >> (i - 1)) & 1u); }

/// Number of simultaneous signals in |k).
unsigned signal_class(BasisIndex k);

/// Sizes of the signal classes C^0..C^r of a rank-r register.
std::vector<std::uint64_t> signal_class_sizes(Rank rank);

/// Sparse labstate |Psi) = sum_k Psi^k |k) over a register of fixed rank.
///
/// Keys are kept in ascending order and exact zeros are never stored, so two
/// states with the same content compare equal with operator==.
class Labstate {
 public:
  using Storage = std::map<BasisIndex, Amplitude>;
  using const_iterator = Storage::const_iterator;

  explicit Labstate(Rank rank = 0);
  Labstate(Rank rank, std::initializer_list<std::pair<const BasisIndex, Amplitude>> terms);

  static Labstate basis(Rank rank, BasisIndex k);
  static Labstate void_state(Rank rank) { return basis(rank, 0); }

  Rank rank() const noexcept { return rank_; }
  Amplitude amplitude(BasisIndex k) const;
  bool contains(BasisIndex k) const { return amplitudes_.count(k) != 0; }

  /// Overwrites the amplitude of |k); a zero value removes the key.
  void set(BasisIndex k, Amplitude a);
  /// Accumulates into the amplitude of |k); an exact zero result removes it.
  void add(BasisIndex k, Amplitude a);

  /// Removes every amplitude whose modulus is below the threshold.
  void prune(double threshold);

  std::size_t size() const noexcept { return amplitudes_.size(); }
  bool empty() const noexcept { return amplitudes_.empty(); }
  const_iterator begin() const noexcept { return amplitudes_.begin(); }
  const_iterator end() const noexcept { return amplitudes_.end(); }

  double norm_squared() const;
  bool is_normalized(double tolerance = kNormTolerance) const;

  Labstate scaled(Amplitude factor) const;

  friend bool operator==(const Labstate&, const Labstate&) = default;

 private:
  void check_key(BasisIndex k) const;

  Rank rank_;
  Storage amplitudes_;
};

/// Sum of conj(a^k) b^k over shared keys.
Amplitude inner_product(const Labstate& a, const Labstate& b);

/// Componentwise a + b; both states must share a rank.
Labstate add(const Labstate& a, const Labstate& b);

/// Largest |a^k - b^k| over the union of keys.
double max_abs_difference(const Labstate& a, const Labstate& b);

/// |Psi^k|^2 per stored key of a normalized state.
std::map<BasisIndex, double> born_probabilities(const Labstate& s);

struct MaximalAnswer {
  Amplitude amplitude;
  double probability = 0.0;
};

/// Answer to the maximal question "is the register in |k)?".
MaximalAnswer maximal_question(const Labstate& s, BasisIndex k);

/// a (x) b, with b's qubits placed after a's.
Labstate tensor(const Labstate& a, const Labstate& b);

Labstate normalize(const Labstate& s);

}  // namespace qdn
