#include <doctest.h>

#include "adopt/core.hpp"

using namespace adopt;

TEST_SUITE("core") {

TEST_CASE("per-click value divides the CPM by 1000 CTR") {
    CHECK(per_click_value(2.0, 0.3) == doctest::Approx(2.0 / 300.0).epsilon(1e-15));
    CHECK(per_click_value(30.0, 0.03) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(per_click_value(1.0, 0.0), DomainError);
}

TEST_CASE("payoff in each strike basis") {
    OptionContract c;
    c.strike = 0.005;
    c.ctr = 0.3;
    c.expiry = 1.0;
    CHECK(payoff(3.0, c) == doctest::Approx(0.01 - 0.005).epsilon(1e-14));
    CHECK(payoff(1.0, c) == 0.0);
    c.strike_basis = StrikeBasis::PerMille;
    c.strike = 1.5;
    CHECK(payoff(3.0, c) == doctest::Approx(1.5));
    CHECK(payoff(1.0, c) == 0.0);
    CHECK(c.strike_per_click() == doctest::Approx(1.5 / 300.0));
    CHECK(c.basis_scale() == doctest::Approx(300.0));
}

TEST_CASE("contract validation") {
    OptionContract c;
    c.strike = 0.01;
    c.expiry = 0.1;
    c.rate = 0.05;
    c.steps = 10;
    CHECK_NOTHROW(c.validate());
    CHECK(c.dt() == doctest::Approx(0.01));
    CHECK(c.step_growth() == doctest::Approx(std::exp(0.0005)));

    auto bad = c;
    bad.ctr = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.ctr = 1.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.expiry = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.steps = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.strike = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("model parameter validation") {
    CHECK_NOTHROW((GbmParams{2.0, 0.5, 0.0}.validate()));
    CHECK_NOTHROW((GbmParams{2.0, 0.0, 0.0}.validate()));
    CHECK_THROWS_AS((GbmParams{0.0, 0.5, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((GbmParams{2.0, -0.1, 0.0}.validate()), DomainError);
    CHECK_NOTHROW((SvParams{20.0, 0.5, 3.0, 0.75, 0.35}.validate()));
    CHECK_THROWS_AS((SvParams{20.0, 0.0, 3.0, 0.75, 0.35}.validate()), DomainError);
    CHECK_THROWS_AS((SvParams{20.0, 0.5, -1.0, 0.75, 0.35}.validate()), DomainError);
    CHECK_THROWS_AS((SvParams{20.0, 0.5, 3.0, 0.75, -0.35}.validate()), DomainError);
}

TEST_CASE("strike basis names round trip") {
    CHECK(parse_strike_basis(to_string(StrikeBasis::PerClick)) == StrikeBasis::PerClick);
    CHECK(parse_strike_basis(to_string(StrikeBasis::PerMille)) == StrikeBasis::PerMille);
    CHECK(parse_strike_basis("cpc") == StrikeBasis::PerClick);
    CHECK(parse_strike_basis("cpm") == StrikeBasis::PerMille);
    CHECK_THROWS_AS(parse_strike_basis("cpa"), DomainError);
}

TEST_CASE("discounting") {
    CHECK(discount(1.0, 0.05, 1.0) == doctest::Approx(std::exp(-0.05)));
    CHECK(discount(2.0, 0.0, 5.0) == 2.0);
}

}
