#include <doctest.h>

#include <cmath>
#include <random>

#include "bperc/hierarchy.hpp"

using namespace bperc;
using nlohmann::json;

namespace {

Constants q_constants(double q, double delta = 0.05) {
    Constants k;
    k.p = -std::expm1(-q);
    k.delta = delta;
    return k;
}

Config random_filled(const Rect& r, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    for (;;) {
        Config c(r);
        for (int y = r.y_lo; y <= r.y_hi; ++y)
            for (int x = r.x_lo; x <= r.x_hi; ++x)
                if (coin(rng)) c.set(x, y, true);
        if (is_internally_filled(c, r)) return c;
    }
}

Hierarchy::Vertex vertex(const Rect& r, std::vector<int> children = {}, XLabel x = {}) {
    return {r, std::move(children), x};
}

}  // namespace

TEST_CASE("a small fully infected square is a single seed") {
    const Constants k = q_constants(0.2);
    const Rect r = make_rect(0, 1, 0, 1);
    Config a(r);
    for (int y = 0; y <= 1; ++y)
        for (int x = 0; x <= 1; ++x) a.set(x, y, true);
    const Hierarchy h = build_hierarchy(a, r, k);
    REQUIRE(h.vertices.size() == 1);
    CHECK(h.is_leaf(0));
    CHECK(h.root_rect() == r);
    CHECK(check_good(h, k).good);
    CHECK(check_satisfied(h, a).satisfied);
    const HierarchyStats st = stats(h, k);
    CHECK(st.v == 1);
    CHECK(st.s == 1);
    CHECK(st.h == 1);
    CHECK(st.X == 4);
    CHECK(st.weight == doctest::Approx(1.0));
}

TEST_CASE("build preconditions") {
    const Constants k = q_constants(0.2);
    const Rect r = make_rect(0, 3, 0, 3);
    Config empty(r);
    CHECK_THROWS_AS(build_hierarchy(empty, r, k), std::invalid_argument);
    // log(1/q) / (2q) ~ 4.02: a side of 5 is too long for q = 0.2.
    const Rect wide = make_rect(0, 4, 0, 4);
    Config full(wide);
    for (int y = 0; y <= 4; ++y)
        for (int x = 0; x <= 4; ++x) full.set(x, y, true);
    CHECK_THROWS_AS(build_hierarchy(full, wide, k), std::invalid_argument);
}

TEST_CASE("built hierarchies are good, satisfied, and round-trip") {
    std::mt19937_64 rng(29);
    for (const double q : {0.2, 0.3}) {
        const Constants k = q_constants(q);
        const int side = (int)std::floor(std::log(1 / q) / (2 * q));
        const Rect r = make_rect(0, side - 1, 0, side - 1);
        for (int t = 0; t < 40; ++t) {
            const Config a = random_filled(r, 0.35, rng);
            const Hierarchy h = build_hierarchy(a, r, k);
            const GoodReport good = check_good(h, k);
            CHECK(good.good);
            if (!good.good)
                for (const auto& v : good.violations)
                    MESSAGE(v.condition, " at ", v.vertex, ": ", v.detail);
            const SatisfactionCertificate cert = check_satisfied(h, a);
            CHECK(cert.satisfied);
            if (!cert.satisfied)
                for (const auto& f : cert.failures) MESSAGE(f);
            const Hierarchy h2 = hierarchy_from_json(json(h));
            CHECK(json(h2) == json(h));
            CHECK(check_good(h2, k).good);
        }
    }
}

TEST_CASE("wider scale constant exercises the near-fit growth case") {
    std::mt19937_64 rng(31);
    const Constants k = q_constants(0.2, 0.5);
    const Rect r = make_rect(0, 3, 0, 3);
    for (int t = 0; t < 60; ++t) {
        const Config a = random_filled(r, 0.3, rng);
        const Hierarchy h = build_hierarchy(a, r, k);
        CHECK(check_good(h, k).good);
        CHECK(check_satisfied(h, a).satisfied);
        CHECK(json(hierarchy_from_json(json(h))) == json(h));
    }
}

TEST_CASE("goodness violations are reported") {
    const Constants k = q_constants(0.2, 0.5);
    // Root with a split into overlapping/ill-nested children.
    Hierarchy bad;
    bad.vertices.push_back(vertex(make_rect(0, 3, 0, 3), {1}));
    bad.vertices.push_back(vertex(make_rect(0, 3, 0, 3)));  // child equals parent
    const GoodReport rep = check_good(bad, k);
    CHECK(!rep.good);
    bool saw_c = false;
    for (const auto& v : rep.violations) saw_c = saw_c || v.condition == "c";
    CHECK(saw_c);

    // A labelled edge into a leaf violates the unlabelled-edge rule.
    Hierarchy lab;
    XLabel x;
    x[Direction::PlusX] = 1;
    lab.vertices.push_back(vertex(make_rect(0, 3, 0, 3), {1}));
    lab.vertices.push_back(vertex(make_rect(0, 1, 0, 1), {}, x));
    bool saw_i = false;
    for (const auto& v : check_good(lab, k).violations) saw_i = saw_i || v.condition == "i";
    CHECK(saw_i);

    // An internal vertex at seed scale violates the leaf rule.
    Hierarchy small;
    small.vertices.push_back(vertex(make_rect(0, 1, 0, 1), {1}));
    small.vertices.push_back(vertex(make_rect(0, 0, 0, 0)));
    bool saw_e = false;
    for (const auto& v : check_good(small, k).violations) saw_e = saw_e || v.condition == "e";
    CHECK(saw_e);
}

TEST_CASE("trunk prefers the child of larger short side, then corner order") {
    Hierarchy h;
    h.vertices.push_back(vertex(make_rect(0, 9, 0, 9), {1, 2}));
    h.vertices.push_back(vertex(make_rect(0, 9, 0, 2), {}));  // short 3
    h.vertices.push_back(vertex(make_rect(0, 4, 0, 4), {}));  // short 5: trunk
    auto tr = trunk(h);
    REQUIRE(tr.size() == 1);
    CHECK(tr[0] == std::pair<int, int>{0, 2});

    // Equal short sides: the lexicographically smaller corner wins.
    Hierarchy tie;
    tie.vertices.push_back(vertex(make_rect(0, 9, 0, 9), {1, 2}));
    tie.vertices.push_back(vertex(make_rect(5, 8, 5, 8), {}));
    tie.vertices.push_back(vertex(make_rect(1, 4, 1, 4), {}));
    auto tr2 = trunk(tie);
    REQUIRE(tr2.size() == 1);
    CHECK(tr2[0] == std::pair<int, int>{0, 2});
}

TEST_CASE("weight multiplies 1/f per selected buffer") {
    Constants k = q_constants(0.2, 0.5);  // B/q = 25, so a 16-side is on the sqrt branch
    Hierarchy h;
    XLabel x;
    x[Direction::PlusX] = 1;
    x[Direction::PlusY] = 1;
    h.vertices.push_back(vertex(make_rect(0, 15, 0, 15), {1}));
    h.vertices.push_back(vertex(make_rect(0, 11, 0, 11), {}, x));
    const HierarchyStats st = stats(h, k);
    const double f = 0.5 * std::sqrt(16.0);
    CHECK(st.weight == doctest::Approx(1.0 / (f * f)).epsilon(1e-12));
    CHECK(st.v == 2);
    CHECK(st.s == 1);
    CHECK(st.m == 1);
    CHECK(st.h == 2);
    CHECK(st.up_phi_sum == 0);
}

TEST_CASE("weighted count bound") {
    const Rect r = make_rect(0, 9, 0, 9);
    CHECK(weighted_count_bound(1, 1, r) ==
          doctest::Approx(std::exp(16 * (1 + std::log(20.0)))).epsilon(1e-12));
    CHECK(weighted_count_bound(3, 2, r) ==
          doctest::Approx(std::exp(16 * (3 + 2 * std::log(20.0)))).epsilon(1e-12));
    CHECK_THROWS(weighted_count_bound(1, 2, r));
    CHECK_THROWS(weighted_count_bound(0, 0, r));
}

TEST_CASE("pod inequalities hold on small built hierarchies") {
    std::mt19937_64 rng(37);
    const double q = 0.2;
    const Constants k = q_constants(q);
    const Rect r = make_rect(0, 3, 0, 3);
    for (int t = 0; t < 20; ++t) {
        const Config a = random_filled(r, 0.35, rng);
        const Hierarchy h = build_hierarchy(a, r, k);
        CHECK(verify_pod_inequality(h, q));
        for (int u = 0; u < (int)h.vertices.size(); ++u)
            CHECK(verify_pod_inequality(h, q, u));
    }
}

TEST_CASE("pod check rejects oversized seed sets") {
    Hierarchy h;
    h.vertices.push_back(vertex(make_rect(0, 99, 0, 99), {}));
    CHECK_THROWS(verify_pod_inequality(h, 0.2));
}

TEST_CASE("hierarchy json rejects malformed trees") {
    json two_parents = {
        {"root_rect", json(make_rect(0, 3, 0, 3))},
        {"vertices",
         json::array({json{{"rect", json(make_rect(0, 3, 0, 3))}, {"children", {1, 1}}, {"x", json(XLabel{})}},
                      json{{"rect", json(make_rect(0, 1, 0, 1))}, {"children", json::array()}, {"x", json(XLabel{})}}})}};
    CHECK_THROWS(hierarchy_from_json(two_parents));

    json bad_index = two_parents;
    bad_index["vertices"][0]["children"] = {5};
    CHECK_THROWS(hierarchy_from_json(bad_index));
}
