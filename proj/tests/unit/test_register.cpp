#include <doctest.h>

#include <bit>
#include <random>

#include "oracles.hpp"
#include "qdn/errors.hpp"
#include "qdn/register.hpp"

using namespace qdn;

TEST_CASE("binary decomposition of 9") {
  const Occupancy o = bit_decompose(9);
  CHECK(o.digits == std::vector<int>{1, 0, 0, 1});
  CHECK(o.minimum_rank == 4);
  CHECK(occupancy(9, 1) == 1);
  CHECK(occupancy(9, 2) == 0);
  CHECK(occupancy(9, 4) == 1);
  CHECK(bit_decompose(0).minimum_rank == 0);
}

TEST_CASE("signal class sizes are binomial") {
  for (Rank r = 0; r <= 12; ++r) {
    std::vector<std::uint64_t> counted(r + 1, 0);
    for (BasisIndex k = 0; k < dimension(r); ++k) ++counted[std::popcount(k)];
    CHECK(signal_class_sizes(r) == counted);
  }
  CHECK(signal_class_sizes(62).back() == 1);
  CHECK(signal_class(0b1011) == 3);
}

TEST_CASE("rank cap") {
  CHECK_NOTHROW(require_rank(62));
  CHECK_THROWS_AS(require_rank(63), RankError);
  CHECK_THROWS_AS(Labstate(63), RankError);
  CHECK_THROWS_AS(Labstate::basis(3, 8), RankError);
  CHECK_NOTHROW(Labstate::basis(62, BasisIndex{1} << 61));
}

TEST_CASE("zeros are never stored") {
  Labstate s(3);
  s.set(5, {0.5, 0.0});
  s.set(5, {});
  CHECK(s.empty());
  s.add(2, {1.0, 0.0});
  s.add(2, {-1.0, 0.0});
  CHECK(s.empty());
  CHECK(s == Labstate(3));
}

TEST_CASE("basis states are orthonormal") {
  for (BasisIndex i = 0; i < 8; ++i) {
    for (BasisIndex j = 0; j < 8; ++j) {
      CHECK(inner_product(Labstate::basis(3, i), Labstate::basis(3, j)) == Amplitude(i == j ? 1.0 : 0.0));
    }
  }
  CHECK_THROWS_AS(inner_product(Labstate(2), Labstate(3)), RankError);
}

TEST_CASE("Born probabilities and maximal questions") {
  const double h = std::sqrt(0.5);
  const Labstate s(2, {{1, {h, 0}}, {2, {0, h}}});
  const auto p = born_probabilities(s);
  CHECK(p.at(1) == doctest::Approx(0.5));
  CHECK(p.at(2) == doctest::Approx(0.5));
  CHECK(maximal_question(s, 2).amplitude == Amplitude(0, h));
  CHECK(maximal_question(s, 0).probability == 0.0);
  CHECK_THROWS_AS(maximal_question(s, 4), RankError);
  CHECK_THROWS_AS(born_probabilities(Labstate(2, {{1, {1, 0}}, {2, {1, 0}}})), NormalizationError);
}

TEST_CASE("normalize") {
  CHECK_THROWS_AS(normalize(Labstate(2)), ZeroNormError);
  const Labstate s = normalize(Labstate(2, {{0, {3, 0}}, {3, {0, 4}}}));
  CHECK(s.is_normalized());
  CHECK(s.amplitude(3) == Amplitude(0, 0.8));
}

TEST_CASE("tensor places the second factor above the first") {
  CHECK(tensor(Labstate::basis(2, 1), Labstate::basis(1, 1)) == Labstate::basis(3, 5));
  CHECK(tensor(Labstate::basis(1, 1), Labstate::basis(2, 2)) == Labstate::basis(3, 0b101));
}

TEST_CASE("tensor properties on random states") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Labstate a = testing::random_state(1 + trial % 3, rng);
    const Labstate b = testing::random_state(1 + trial % 4, rng);
    const Labstate t = tensor(a, b);
    CHECK(t.rank() == a.rank() + b.rank());
    CHECK(t.norm_squared() == doctest::Approx(a.norm_squared() * b.norm_squared()).epsilon(1e-12));
    for (const auto& [i, x] : a) {
      for (const auto& [j, y] : b) {
        const BasisIndex k = i | (j << a.rank());
        CHECK(std::abs(t.amplitude(k) - x * y) < 1e-15);
        CHECK(signal_class(k) == signal_class(i) + signal_class(j));
      }
    }
  }
}

TEST_CASE("add and difference") {
  const Labstate a(2, {{1, {1, 0}}});
  const Labstate b(2, {{1, {-1, 0}}, {2, {0, 1}}});
  CHECK(add(a, b) == Labstate(2, {{2, {0, 1}}}));
  CHECK(max_abs_difference(a, b) == doctest::Approx(2.0));
  CHECK(a.scaled({0, 2}).amplitude(1) == Amplitude(0, 2));
}

TEST_CASE("prune") {
  Labstate s(2, {{0, {1e-16, 0}}, {1, {1, 0}}});
  s.prune(1e-15);
  CHECK(s.size() == 1);
}
