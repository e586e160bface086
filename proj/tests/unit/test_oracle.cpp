#include <doctest.h>

#include "dfgr/oracle.hpp"

using namespace dfgr;

TEST_CASE("number-basis reference") {
  SUBCASE("small displaced mode agrees with the closed forms") {
    const FockOracle o({reference_one_mode(300), 200, 1000});
    CHECK(o.truncation_leak() < 1e-8);
    const OracleCheck eq = check_eq_correlation(o, 1000);
    CHECK(eq.pass);
    CHECK(eq.value < 1e-6);
    CHECK(check_neq_correlation(o, 3000, 1000, 4).pass);
  }
  SUBCASE("exact propagation conserves probability") {
    const FockOracle o({reference_one_mode(300, -1.8e-3, 1e-5), 250, 1000});
    const PopulationTrace p = o.exact_populations(1e-5, -1.8e-3, TimeGrid{5000, 50});
    CHECK(p.P.front() == doctest::Approx(0.0).epsilon(1e-15));
    for (double v : p.P) {
      CHECK(v >= -1e-15);
      CHECK(v < 1.0);
    }
  }
  SUBCASE("too few levels") { CHECK_THROWS_AS(FockOracle({reference_one_mode(884), 40, 1000}), TruncationError); }
  SUBCASE("mode and size limits") {
    const RealVector w = RealVector::Constant(3, 2e-4);
    const DuschinskiiSystem three = DuschinskiiSystem::from_reduced(
        w, w, RealMatrix::Identity(3, 3), RealVector::Zero(3), RealVector::Zero(3), 1e-4, 0.0);
    CHECK_THROWS_AS(FockOracle({three, 10, 1000}), ValidationError);
    CHECK_THROWS_AS(FockOracle({reference_two_mode(), 200, 1000}), ValidationError);
  }
  SUBCASE("the trivial limit check") { CHECK(check_trivial_limit().pass); }
}
