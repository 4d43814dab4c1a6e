#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "oracles.hpp"
#include "qdn/errors.hpp"
#include "qdn/optics.hpp"

using namespace qdn;
using namespace qdn::optics;

namespace {

bool semi_unitary(const ModuleAction& m) {
  return check_semi_unitary({m.in_arity(), m.out_arity(), m.local_matrix()}).accepted;
}

}  // namespace

TEST_CASE("symmetric beam splitter rules") {
  const double r = std::sqrt(0.5);
  const ModuleAction bs = symmetric_beamsplitter();
  CHECK(*bs.row(0) == Labstate::void_state(2));
  CHECK(std::abs(bs.row(1)->amplitude(1) - Amplitude(r, 0)) < 1e-15);
  CHECK(std::abs(bs.row(1)->amplitude(2) - Amplitude(0, r)) < 1e-15);
  CHECK(std::abs(bs.row(2)->amplitude(1) - Amplitude(0, r)) < 1e-15);
  CHECK(std::abs(bs.row(2)->amplitude(2) - Amplitude(r, 0)) < 1e-15);
  CHECK(*bs.row(3) == Labstate::basis(2, 3));
  CHECK(semi_unitary(bs));
  CHECK(check_semi_unitary({2, 2, bs.local_matrix()}).unitary);
}

TEST_CASE("beam splitter parameter relations") {
  try {
    beamsplitter({{1, 0}, {1, 0}, {0, 0}, {1, 0}});
    FAIL("expected ParamError");
  } catch (const ParamError& e) {
    CHECK(std::string(e.what()).find("|alpha|^2+|beta|^2 = 1 violated") != std::string::npos);
  }
  const double r = std::sqrt(0.5);
  CHECK_THROWS_AS(beamsplitter({{r, 0}, {r, 0}, {r, 0}, {r, 0}}), ParamError);
  CHECK_THROWS_AS(beamsplitter({{r, 0}, {0, r}, {0, r}, {r, 0}, {2, 0}}), ParamError);
}

TEST_CASE("random beam splitters are unitary") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto p = testing::random_beamsplitter(rng);
    CHECK(semi_unitary(beamsplitter({p[0], p[1], p[2], p[3]})));
  }
}

TEST_CASE("adjoint splitter undoes the first on one-signal states") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto p = testing::random_beamsplitter(rng);
    const BeamSplitterParams first{p[0], p[1], p[2], p[3]};
    const Eigen::MatrixXcd m = beamsplitter(adjoint(first)).local_matrix() * beamsplitter(first).local_matrix();
    CHECK((m.block(1, 1, 2, 2) - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("Wollaston prism") {
  const double theta = std::numbers::pi / 3;
  const double a = 1 / std::sqrt(3.0);
  const WollastonParams p{theta, a, a};
  CHECK(wollaston_constraint(p) == doctest::Approx(1.0));
  const ModuleAction w = wollaston(p);
  CHECK(std::abs(w.row(1)->amplitude(1) - 2 * a * std::cos(theta / 2)) < 1e-15);
  CHECK(std::abs(w.row(1)->amplitude(2)) < 1e-15);
  CHECK(semi_unitary(w));
  CHECK_THROWS_AS(wollaston({theta, 1.0, 1.0}), ParamError);
  CHECK_THROWS_AS(wollaston({std::numbers::pi, 0.5, 0.5}), ParamError);
}

TEST_CASE("Brandt splitter") {
  const double theta = 1.0;
  const ModuleAction b = brandt_bs1(theta);
  const double t = std::tan(theta / 2);
  CHECK(std::abs(b.row(1)->amplitude(1) - std::sqrt(1 - t * t)) < 1e-15);
  CHECK(std::abs(b.row(1)->amplitude(2) - Amplitude(0, t)) < 1e-15);
  CHECK(semi_unitary(b));
  CHECK_NOTHROW(brandt_bs1(0.0));
  CHECK_NOTHROW(brandt_bs1(std::numbers::pi / 2));
  CHECK_THROWS_AS(brandt_bs1(1.6), ParamError);
  CHECK_THROWS_AS(brandt_bs1(-0.1), ParamError);
}

TEST_CASE("phase elements") {
  CHECK(std::abs(mirror(0.3).row(1)->amplitude(1) - std::polar(1.0, 0.3)) < 1e-15);
  CHECK(rotator().row(1)->amplitude(1) == Amplitude(-1, 0));
  CHECK(*wire().row(1) == Labstate::basis(1, 1));
  CHECK_THROWS_AS(phase_element({std::nan("")}), ParamError);
}

TEST_CASE("pair source emits c,e or d,f") {
  const ModuleAction p = pair_source({0.7});
  const Labstate& image = *p.row(1);
  CHECK(image.size() == 2);
  CHECK(std::abs(image.amplitude(0b0101) - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(image.amplitude(0b1010) - std::polar(std::sqrt(0.5), 0.7)) < 1e-15);
  CHECK(semi_unitary(p));
}

TEST_CASE("every builder is isolated") {
  for (const ModuleAction& m : {symmetric_beamsplitter(), wollaston({0.5, 1.0, 0.0}),
                                brandt_bs1(0.4), mirror(1.0), rotator(), pair_source({0.1}), wire()}) {
    CHECK(m.isolated());
  }
}
