#include <doctest.h>

#include <cmath>
#include <random>

#include "bperc/numerics.hpp"

using namespace bperc;

TEST_CASE("beta and g at hand-computed points") {
    // beta(1/2) = (1 + sqrt 5)/4, the golden-ratio value.
    CHECK(beta(0.5) == doctest::Approx(0.8090169943749474).epsilon(1e-14));
    CHECK(beta(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g(std::log(2.0)) == doctest::Approx(0.21193535550034186).epsilon(1e-12));
    CHECK(g(0.1) == doctest::Approx(1.0646361850683716).epsilon(1e-12));
    CHECK(g(1.0) == doctest::Approx(0.11357766223993271).epsilon(1e-12));
}

TEST_CASE("g is positive, decreasing, and convex on a grid") {
    double prev = g(1e-4);
    double prev_diff = -1;
    for (int i = 1; i <= 2000; ++i) {
        const double z = 1e-4 + i * (5.0 - 1e-4) / 2000;
        const double v = g(z);
        CHECK(v > 0);
        CHECK(v < prev);
        const double diff = v - prev;
        if (prev_diff < 0 && i > 1) CHECK(diff >= prev_diff - 1e-15);
        prev_diff = diff;
        prev = v;
    }
}

TEST_CASE("small-z envelope of g") {
    for (double z : {0.001, 0.005, 0.01, 0.02, 0.05}) {
        const double v = g(z);
        CHECK(v >= -0.5 * std::log(z) - std::sqrt(z));
        CHECK(v <= -0.5 * std::log(z) + z);
    }
}

TEST_CASE("g integrals") {
    CHECK(g_integral(0, 1) == doctest::Approx(0.4896839302696106).epsilon(1e-10));
    CHECK(lambda() == doctest::Approx(M_PI * M_PI / 18).epsilon(1e-10));
    // Additivity.
    CHECK(g_integral(0, 0.3) + g_integral(0.3, 2.0) ==
          doctest::Approx(g_integral(0, 2.0)).epsilon(1e-11));
}

TEST_CASE("W matches the diagonal closed form") {
    const double q = 0.1;
    const Rect s = make_rect(0, 2, 0, 3);
    const Rect r = make_rect(0, 9, 0, 11);
    const double closed = U_diagonal_closed_form(s, r, q);
    const double w = W(q * s.width(), q * s.height(), q * r.width(), q * r.height(), 1e-9) / q;
    CHECK(w == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("W degenerate cases") {
    CHECK(W(0.5, 0.5, 0.5, 0.5) == doctest::Approx(0.0));
    // Horizontal-only path: integral of g(y) dx = (bx-ax) g(ay).
    CHECK(W(0.2, 0.4, 0.9, 0.4) == doctest::Approx(0.7 * g(0.4)).epsilon(1e-6));
    CHECK(W(0.2, 0.4, 0.2, 0.9) == doctest::Approx(0.5 * g(0.2)).epsilon(1e-6));
}

TEST_CASE("Q at a hand-computed point and U <= qQ") {
    const double q = 0.1;
    const Rect s = make_rect(0, 1, 0, 0);   // 2 x 1
    const Rect r = make_rect(0, 9, 0, 9);   // 10 x 10
    // (10-2) g(0.1*1) + (10-1) g(0.1*2)... dims order: extra width times
    // g(q*height(S)) + extra height times g(q*width(S)).
    const double expect = 8 * g(0.1) + 9 * g(0.2);
    CHECK(Q(s, r, q) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(U(s, r, q) <= q * Q(s, r, q) + 1e-9);

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> dim(1, 12), grow(0, 10);
    for (int t = 0; t < 25; ++t) {
        const int sw = dim(rng), sh = dim(rng);
        const Rect ss = make_rect(0, sw - 1, 0, sh - 1);
        const Rect rr = make_rect(0, sw - 1 + grow(rng), 0, sh - 1 + grow(rng));
        CHECK(U(ss, rr, q) <= q * Q(ss, rr, q) + 1e-7);
    }
}

TEST_CASE("U lower bound sits below the closed form") {
    const double q = 0.2;
    for (int a = 2; a <= 6; ++a)
        for (int b = a; b <= 8; ++b) {
            const Rect r = make_rect(0, a - 1, 0, b - 1);
            for (int c = 1; c <= a; ++c)
                for (int d = c; d <= a; ++d) {
                    const Rect s = make_rect(0, c - 1, 0, d - 1);
                    CHECK(U_lower_bound(s, r, q) <=
                          U_diagonal_closed_form(s, r, q) + 1e-9);
                }
        }
}

TEST_CASE("scale function f and its continuity at the branch point") {
    Constants k;
    k.p = -std::expm1(-0.5);  // q = 0.5, so B/q = 10
    const double fa = f_R(make_rect(0, 8, 0, 40), k);   // short 9 <= 10
    CHECK(fa == doctest::Approx(k.delta * 3.0).epsilon(1e-12));
    const double f_at = f_R(make_rect(0, 9, 0, 40), k);  // short exactly B/q
    CHECK(f_at == doctest::Approx(k.delta * std::sqrt(10.0)).epsilon(1e-12));
    const double fb = f_R(make_rect(0, 11, 0, 40), k);   // short 12 > 10
    CHECK(fb == doctest::Approx(k.delta / std::sqrt(0.5) * std::exp(12 * 0.5)).epsilon(1e-12));
}

TEST_CASE("bound reports carry preconditions and sane values") {
    Constants k;  // p = 0.1
    const BoundReport seeds = seeds_bound(make_rect(0, 1, 0, 3), k);  // 2 x 4, ap = 0.2 > delta
    CHECK(!seeds.valid);

    Constants tiny;
    tiny.p = 0.005;
    const BoundReport s2 = seeds_bound(make_rect(0, 3, 0, 5), tiny);  // ap = 0.02 <= 0.05
    CHECK(s2.valid);
    CHECK(!s2.vacuous);
    CHECK(s2.value == doctest::Approx(std::exp(s2.log_value)).epsilon(1e-12));
    CHECK(s2.log_value ==
          doctest::Approx(10 * (std::log(3.0) - g(4 * tiny.q()))).epsilon(1e-10));

    const auto [gap, cross] = crossing_bounds(make_rect(0, 19, 0, 29), k);
    CHECK(gap.log_value == doctest::Approx(-19 * g(30 * k.q())).epsilon(1e-10));
    CHECK(cross.log_value == doctest::Approx(-20 * g(30 * k.q())).epsilon(1e-10));
    CHECK(cross.value <= gap.value);
}

TEST_CASE("droplet bound takes the smaller exponent") {
    Constants k;  // p = 0.1
    const Rect r = make_rect(0, 49, 0, 99);
    const BoundReport b = droplet_bound(r, k);
    const double q = k.q();
    const double lam_term = 2 * lambda() / q + std::pow(q, -0.75);
    const double j_term = J(r, k) - k.L6 / std::sqrt(q);
    CHECK(b.log_value == doctest::Approx(-std::min(lam_term, j_term)).epsilon(1e-10));
    CHECK(b.branch == (lam_term <= j_term ? "lambda" : "J"));
    // The huge default L6 makes the J branch dominate and the bound vacuous.
    CHECK(b.vacuous == !(b.value < 1.0));
}

TEST_CASE("leaving-diagonal comparison in its validity window") {
    Constants k;
    k.p = 1e-5;
    k.B = 1.005;
    k.C = 1.01;
    k.L1 = 1e5;
    k.L2 = 2e5;
    k.L3 = 3e5;
    k.L4 = 4e5;
    k.L5 = 5e5;
    k.L6 = 6e5;
    const auto rep = leaving_diagonal_check(1, 100000, k);
    CHECK(rep.valid);
    CHECK(rep.holds);
    CHECK(rep.lhs == doctest::Approx(97923.899).epsilon(1e-4));
    CHECK(rep.rhs == doctest::Approx(182840.444).epsilon(1e-6));
}

TEST_CASE("lower bound on the critical probability") {
    Constants k;
    k.L6 = 1.0;
    const PcLowerBound small = pc_lower_bound(4, k);
    CHECK(small.vacuous);
    const PcLowerBound big = pc_lower_bound(1000000000, k);
    if (!big.vacuous) {
        CHECK(big.q_star > 0);
        CHECK(big.p_star > 0);
        CHECK(big.p_star < 1);
        CHECK(big.q_star < lambda() / std::log(1e9) + 1e-12);
    }
    CHECK(pc_lower_bound(2, k).vacuous);
}

TEST_CASE("constants validation") {
    Constants k;
    CHECK_NOTHROW(k.validate());
    k.p = 1.5;
    CHECK_THROWS(k.validate());
    k = Constants{};
    k.B = 0.5;
    CHECK_THROWS(k.validate());
    k = Constants{};
    k.L2 = k.L1 / 2;
    CHECK_THROWS(k.validate());
}
