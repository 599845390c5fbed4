#include <doctest.h>

#include <cmath>
#include <vector>

#include "epimon/errors.hpp"
#include "epimon/series.hpp"
#include "oracles.hpp"

using namespace epimon;

namespace {

ObservationSeries make(std::string label, std::vector<Observation> pts) {
  return ObservationSeries{std::move(label), std::move(pts)};
}

ObservationSeries random_series(oracle::Gen& g, int first, int n) {
  ObservationSeries s{"r", {}};
  int day = first;
  for (int i = 0; i < n; ++i) {
    day += g.integer(1, 3);
    s.points.push_back({day, g.integer(0, 500)});
  }
  return s;
}

}  // namespace

TEST_SUITE("series") {
  TEST_CASE("dates round-trip through day indices") {
    const Epoch e{2020, 3, 1};
    CHECK(parse_date("2020-03-01", e) == 0);
    CHECK(parse_date("2020-03-31", e) == 30);
    CHECK(parse_date("2020-02-29", e) == -1);
    CHECK(format_date(61, e) == "2020-05-01");
    CHECK(format_date(parse_date("2021-01-01", e), e) == "2021-01-01");
    CHECK_THROWS_AS(parse_date("2020-02-30"), DataError);
    CHECK_THROWS_AS(parse_date("2020/03/01"), DataError);
    CHECK_THROWS_AS(parse_date("20-03-01"), DataError);
  }

  TEST_CASE("parse two rows") {
    const auto s = parse_csv("date,count\n2020-03-01,12\n2020-03-02,15");
    REQUIRE(s.size() == 2);
    CHECK(s.points[0].count == 12);
    CHECK(s.points[1].count == 15);
    CHECK(s.points[1].day == s.points[0].day + 1);
  }

  TEST_CASE("CRLF and unordered rows are accepted") {
    const auto s = parse_csv("date,count\r\n2020-03-02,15\r\n2020-03-01,12\r\n");
    REQUIRE(s.size() == 2);
    CHECK(s.points[0].count == 12);
    CHECK(s.points[1].count == 15);
  }

  TEST_CASE("duplicate date is rejected with its line number") {
    try {
      parse_csv("date,count\n2020-03-01,12\n2020-03-01,3\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("negative and malformed rows") {
    CHECK_THROWS_AS(parse_csv("date,count\n2020-03-01,-1\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("date,count\n2020-03-01,1.5\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("date,count\n2020-03-01\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("date,count\n2020-03-01,1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("day,count\n2020-03-01,1\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(""), ParseError);
    try {
      parse_csv("date,count\n2020-03-01,4\nbad,1\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("canonical text round-trips byte for byte") {
    oracle::Gen g(11);
    for (int rep = 0; rep < 50; ++rep) {
      const auto s = random_series(g, g.integer(-100, 100), g.integer(1, 40));
      const auto text = to_csv(s);
      CHECK(to_csv(parse_csv(text)) == text);
    }
    const std::string with_bom = "\xEF\xBB\xBF" "date,count\n2020-03-01,7\n";
    CHECK(parse_csv(with_bom).points.at(0).count == 7);
  }

  TEST_CASE("aggregate sums over the union of days") {
    const auto micu = make("MICU", {{1, 9}, {2, 5}});
    const auto emt = make("EMT", {{1, 276}, {2, 260}});
    const ObservationSeries both[] = {micu, emt};
    const auto disp = aggregate(both);
    REQUIRE(disp.size() == 2);
    CHECK(disp.points[0].count == 285);
    CHECK(disp.points[1].count == 265);

    const ObservationSeries one[] = {micu};
    CHECK(aggregate(one).points == micu.points);

    const ObservationSeries disjoint[] = {make("A", {{1, 1}}), make("B", {{2, 1}})};
    const auto u = aggregate(disjoint);
    CHECK(u.points == std::vector<Observation>{{1, 1}, {2, 1}});

    CHECK_THROWS_AS(aggregate(std::span<const ObservationSeries>{}), PreconditionError);
  }

  TEST_CASE("aggregate is commutative and associative") {
    oracle::Gen g(12);
    for (int rep = 0; rep < 30; ++rep) {
      const auto a = random_series(g, 0, 10), b = random_series(g, 3, 12), c = random_series(g, -4, 8);
      const ObservationSeries ab[] = {a, b}, ba[] = {b, a};
      CHECK(aggregate(ab).points == aggregate(ba).points);
      const ObservationSeries ab_c[] = {aggregate(ab), c};
      const ObservationSeries bc[] = {b, c};
      const ObservationSeries a_bc[] = {a, aggregate(bc)};
      const ObservationSeries abc[] = {a, b, c};
      CHECK(aggregate(ab_c).points == aggregate(a_bc).points);
      CHECK(aggregate(abc).points == aggregate(a_bc).points);
    }
  }

  TEST_CASE("window slicing") {
    ObservationSeries s{"s", {}};
    for (int d = 0; d < 30; ++d) s.points.push_back({d, d + 1});
    const auto w = window(s, 10, 29);
    REQUIRE(w.size() == 10);
    CHECK(w.points.front().day == 20);
    CHECK(w.points.back().day == 29);
    CHECK(window(s, 100, 29).size() == 30);
    CHECK_THROWS_AS(window(s, 10, 0), DataError);
    CHECK_THROWS_AS(window(s, 1, 29), PreconditionError);
  }

  TEST_CASE("log transform") {
    const auto exact = log_transform(make("x", {{0, 1}, {1, 1}, {2, 1}}));
    CHECK(exact.points[0].z == 0.0);

    const auto l = log_transform(make("x", {{0, 0}, {1, 5}}));
    REQUIRE(l.size() == 1);
    CHECK(l.points[0].z == doctest::Approx(std::log(5.0)));
    CHECK(l.dropped_zero_days == 1);

    const auto pw = log_transform(make("x", {{0, 1}, {1, 2}, {2, 4}}));
    CHECK(pw.points[2].z - pw.points[1].z == doctest::Approx(std::log(2.0)));
    CHECK(pw.points[1].z == doctest::Approx(std::log(2.0)));

    CHECK_THROWS_AS(log_transform(make("x", {{0, 0}, {1, 0}})), DataError);
  }

  TEST_CASE("log of aggregate is monotone in every count") {
    oracle::Gen g(13);
    for (int rep = 0; rep < 30; ++rep) {
      auto a = random_series(g, 0, 15), b = random_series(g, 0, 15);
      for (auto& p : a.points) p.count += 1;
      for (auto& p : b.points) p.count += 1;
      const ObservationSeries ab[] = {a, b};
      const auto base = log_transform(aggregate(ab));
      auto bumped = a;
      bumped.points[static_cast<std::size_t>(g.integer(0, 14))].count += g.integer(1, 50);
      const ObservationSeries bb[] = {bumped, b};
      const auto up = log_transform(aggregate(bb));
      REQUIRE(up.size() == base.size());
      for (std::size_t i = 0; i < up.size(); ++i) CHECK(up.points[i].z >= base.points[i].z);
    }
  }

  TEST_CASE("log series CSV") {
    LogSeries s{"s", {{0, 0.5}, {2, 1.0 / 3.0}}, 0};
    const auto text = to_csv(s);
    const auto back = parse_log_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back.points[1].z == s.points[1].z);
    CHECK(to_csv(back) == text);
  }
}
