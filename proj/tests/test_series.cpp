#include <doctest.h>

#include <cmath>
#include <sstream>

#include "adopt/csv.hpp"
#include "adopt/series.hpp"

using namespace adopt;

TEST_SUITE("series") {

TEST_CASE("number formatting uses 12 significant digits") {
    CHECK(format_number(0.0016949026752235633) == "0.00169490267522");
    CHECK(format_number(5.0) == "5");
    CHECK(format_number(std::nan("")).empty());
}

TEST_CASE("CSV splitting trims fields and carriage returns") {
    const auto f = split_csv_line(" 2013-02-07 , 0.7427\r");
    REQUIRE(f.size() == 2);
    CHECK(f[0] == "2013-02-07");
    CHECK(f[1] == "0.7427");
    CHECK(split_csv_line("a,,b").size() == 3);
}

TEST_CASE("dates") {
    const auto d = parse_date("2013-02-07");
    CHECK(format_date(d) == "2013-02-07");
    CHECK(format_date(d + std::chrono::days{22}) == "2013-03-01");
    CHECK_THROWS_AS(parse_date("2013-02-30"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("07/02/2013"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("2013-02-07x"), std::invalid_argument);
}

TEST_CASE("reading a daily series infers dt") {
    std::istringstream in("date,price\n2013-02-07,0.7427\n2013-02-08,0.9585\n\n2013-02-09,0.9770\n");
    const auto s = read_price_series(in);
    REQUIRE(s.size() == 3);
    CHECK(s.dt == doctest::Approx(1.0 / 365.0));
    CHECK(s.observations[1].price == 0.9585);
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("weekly spacing gives dt = 7/365") {
    std::istringstream in("date,price\n2013-01-01,1\n2013-01-08,2\n2013-01-15,3\n");
    CHECK(read_price_series(in).dt == doctest::Approx(7.0 / 365.0));
}

TEST_CASE("parse errors name the line") {
    std::istringstream bad_header("day,price\n2013-01-01,1\n");
    CHECK_THROWS_WITH_AS(read_price_series(bad_header), doctest::Contains("line 1"), ParseError);
    std::istringstream bad_value("date,price\n2013-01-01,1\n2013-01-02,abc\n");
    CHECK_THROWS_WITH_AS(read_price_series(bad_value), doctest::Contains("line 3"), ParseError);
    std::istringstream bad_width("date,price\n2013-01-01,1,2\n");
    CHECK_THROWS_WITH_AS(read_price_series(bad_width), doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_WITH(read_price_series_file("/nonexistent/x.csv"), doctest::Contains("file not found"));
}

TEST_CASE("series invariants") {
    const double prices[] = {1.0, 2.0, 3.0};
    auto s = PriceSeries::from_prices(prices, 1.0 / 365.0);
    CHECK_NOTHROW(s.validate());
    s.observations[1].price = 0.0;
    CHECK_THROWS(s.validate());
    s.observations[1].price = 2.0;
    s.observations[2].date = s.observations[1].date;
    CHECK_THROWS(s.validate());
    s.observations[2].date = s.observations[1].date + std::chrono::days{5};
    CHECK_THROWS(s.validate());
}

TEST_CASE("write then read round trips") {
    const double prices[] = {0.7427, 0.9585, 0.977};
    const auto s = PriceSeries::from_prices(prices, 1.0 / 365.0);
    std::stringstream io;
    write_price_series(io, s);
    const auto back = read_price_series(io);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.observations[i].price == s.observations[i].price);
        CHECK(back.observations[i].date == s.observations[i].date);
    }
}

}
