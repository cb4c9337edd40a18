#include <doctest.h>

#include <json.hpp>

#include "bperc/lattice.hpp"

using namespace bperc;
using nlohmann::json;

TEST_CASE("rect geometry") {
    const Rect r = make_rect(2, 5, -1, 6);
    CHECK(r.width() == 4);
    CHECK(r.height() == 8);
    CHECK(r.short_side() == 4);
    CHECK(r.long_side() == 8);
    CHECK(r.phi() == 12);
    CHECK(r.area() == 32);
    CHECK(r.contains(Site{2, -1}));
    CHECK(r.contains(Site{5, 6}));
    CHECK(!r.contains(Site{6, 0}));
    CHECK(r.contains(make_rect(3, 4, 0, 0)));
    CHECK(!r.contains(make_rect(3, 6, 0, 0)));
    CHECK_THROWS_AS(make_rect(1, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("rect_less is a strict total order on corners") {
    CHECK(rect_less(make_rect(0, 9, 0, 9), make_rect(1, 2, 0, 0)));
    CHECK(rect_less(make_rect(0, 1, 0, 1), make_rect(0, 1, 1, 1)));
    CHECK(rect_less(make_rect(0, 1, 0, 1), make_rect(0, 2, 0, 1)));
    CHECK(!rect_less(make_rect(0, 1, 0, 1), make_rect(0, 1, 0, 1)));
}

TEST_CASE("directions") {
    for (Direction d : kDirections) {
        CHECK(dir_dx(d) * dir_dx(d) + dir_dy(d) * dir_dy(d) == 1);
        CHECK(dir_dx(dir_opposite(d)) == -dir_dx(d));
        CHECK(dir_dy(dir_opposite(d)) == -dir_dy(d));
        CHECK(dir_from_name(dir_name(d)) == d);
    }
    CHECK_THROWS(dir_from_name("up"));
}

TEST_CASE("side distances") {
    const Rect r = make_rect(0, 10, 0, 20);
    const Rect s = make_rect(2, 7, 1, 16);
    const SideDistances d = side_distances(s, r);
    CHECK(d[Direction::MinusX] == 2);
    CHECK(d[Direction::PlusX] == 3);
    CHECK(d[Direction::MinusY] == 1);
    CHECK(d[Direction::PlusY] == 4);
    CHECK(d.max() == 4);
}

TEST_CASE("config set/at/count") {
    Config c(make_rect(0, 3, 0, 3));
    CHECK(c.count() == 0);
    c.set(1, 2, true);
    c.set(1, 2, true);  // idempotent
    c.set(3, 3, true);
    CHECK(c.count() == 2);
    CHECK(c.at(1, 2));
    CHECK(!c.at(0, 0));
    CHECK(!c.at(-1, 0));  // outside the domain reads false
    CHECK(!c.at(4, 4));
    c.set(3, 3, false);
    CHECK(c.count() == 1);
    CHECK_THROWS(c.set(4, 0, true));

    c.set(0, 0, true);
    c.set(2, 0, true);
    const auto sites = c.sites();  // row-major
    REQUIRE(sites.size() == 3);
    CHECK(sites[0] == Site{0, 0});
    CHECK(sites[1] == Site{2, 0});
    CHECK(sites[2] == Site{1, 2});
    CHECK(c.count_in(make_rect(0, 3, 0, 0)) == 2);
    CHECK(c.count_in(make_rect(1, 1, 0, 3)) == 1);
}

TEST_CASE("json round trips") {
    const Rect r = make_rect(-2, 4, 3, 9);
    const Rect r2 = json(r).get<Rect>();
    CHECK(r == r2);

    Config c(make_rect(0, 2, 0, 2));
    c.set(0, 1, true);
    c.set(2, 2, true);
    const Config c2 = config_from_json(json(c));
    CHECK(c == c2);
}
