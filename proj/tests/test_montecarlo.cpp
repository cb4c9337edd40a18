#include <doctest.h>

#include <cmath>

#include "bperc/montecarlo.hpp"

using namespace bperc;

TEST_CASE("wilson interval basics") {
    const Wilson w0 = wilson_interval(0, 100);
    CHECK(w0.lo == 0.0);
    CHECK(w0.hi > 0.0);
    CHECK(w0.hi < 0.05);
    const Wilson w1 = wilson_interval(100, 100);
    CHECK(w1.hi == 1.0);
    CHECK(w1.lo > 0.95);
    const Wilson mid = wilson_interval(50, 100);
    CHECK(mid.lo < 0.5);
    CHECK(mid.hi > 0.5);
    CHECK(mid.hi - mid.lo < 0.25);
    // Intervals tighten with more data.
    const Wilson big = wilson_interval(5000, 10000);
    CHECK(big.hi - big.lo < mid.hi - mid.lo);
}

TEST_CASE("substreams are reproducible and index-addressable") {
    const TrialStream s(42);
    Substream a = s.at(7);
    Substream b = s.at(7);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() == b.next_u64());
    Substream c = s.at(8);
    Substream d = s.at(7);
    CHECK(c.next_u64() != d.next_u64());
    // Forks diverge from the parent.
    Substream e = s.fork(1).at(7);
    CHECK(e.next_u64() != s.at(7).next_u64());
    // Doubles land in [0, 1).
    Substream u = s.at(0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.next_double();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("sampled configurations depend only on (seed, index)") {
    const Rect r = make_rect(0, 9, 0, 9);
    const TrialStream s(99);
    CHECK(sample_config(0.3, r, s, 5) == sample_config(0.3, r, s, 5));
    CHECK(!(sample_config(0.3, r, s, 5) == sample_config(0.3, r, s, 6)));
    CHECK(sample_config(0.0, r, s, 1).count() == 0);
    CHECK(sample_config(1.0, r, s, 1).count() == r.area());
}

TEST_CASE("estimates are independent of the worker count") {
    const Rect r = make_rect(0, 7, 0, 7);
    const auto filled = [&](const Config& c) { return is_internally_filled(c, r); };
    const Estimate one = estimate_event("filled", filled, 0.25, r, 2000, 5, 1);
    const Estimate four = estimate_event("filled", filled, 0.25, r, 2000, 5, 4);
    CHECK(one.p_hat == four.p_hat);
    CHECK(one.ci_lo == four.ci_lo);
    CHECK(one.ci_hi == four.ci_hi);
    CHECK(one.trials == 2000);
    CHECK(one.seed == 5);
    CHECK(one.ci_lo <= one.p_hat);
    CHECK(one.p_hat <= one.ci_hi);
}

TEST_CASE("degenerate probabilities") {
    const Rect r = make_rect(0, 3, 0, 3);
    const auto filled = [&](const Config& c) { return is_internally_filled(c, r); };
    CHECK(estimate_event("filled", filled, 0.0, r, 200, 1).p_hat == 0.0);
    CHECK(estimate_event("filled", filled, 1.0, r, 200, 1).p_hat == 1.0);
}

TEST_CASE("acceptance rate of the 2x2 sampler matches exact enumeration") {
    // P(internally filled) for a 2x2 square: complement of configurations
    // whose closure misses a site. Exact value by brute force over 16 cases.
    const Rect r = make_rect(0, 1, 0, 1);
    const double p = 0.3;
    double exact = 0.0;
    for (int m = 0; m < 16; ++m) {
        Config c(r);
        for (int i = 0; i < 4; ++i)
            if (m & (1 << i)) c.set(i % 2, i / 2, true);
        if (!is_internally_filled(c, r)) continue;
        const int k = __builtin_popcount((unsigned)m);
        exact += std::pow(p, k) * std::pow(1 - p, 4 - k);
    }
    const auto filled = [&](const Config& c) { return is_internally_filled(c, r); };
    const Estimate e = estimate_event("filled", filled, p, r, 200000, 12, 4);
    CHECK(e.ci_lo <= exact);
    CHECK(exact <= e.ci_hi);

    const FilledSample fs = estimate_filled_conditioned(r, p, 25, 12);
    CHECK(!fs.partial);
    CHECK(fs.configs.size() == 25);
    for (const auto& c : fs.configs) CHECK(is_internally_filled(c, r));
    CHECK(fs.acceptance.ci_lo <= exact);
    CHECK(exact <= fs.acceptance.ci_hi);
}

TEST_CASE("critical-probability bisection brackets a plausible value") {
    const Estimate e = estimate_pc(24, 100, 0.02, 7, 4);
    CHECK(e.event == "pc");
    CHECK(e.p_hat > 0.0);
    CHECK(e.p_hat < 1.0);
    CHECK(e.ci_lo <= e.p_hat);
    CHECK(e.p_hat <= e.ci_hi);
    // Re-running with the same seed reproduces the estimate exactly.
    const Estimate e2 = estimate_pc(24, 100, 0.02, 7, 2);
    CHECK(e.p_hat == e2.p_hat);
    CHECK(e.ci_lo == e2.ci_lo);
    CHECK(e.ci_hi == e2.ci_hi);
}

TEST_CASE("csv row format") {
    Estimate e;
    e.event = "filled";
    e.n_or_dims = "8x8";
    e.p = 0.125;
    e.trials = 10;
    e.p_hat = 0.5;
    e.ci_lo = 0.25;
    e.ci_hi = 0.75;
    e.seed = 3;
    e.runtime_ms = 1.5;
    CHECK(estimate_csv_header() == "event,n_or_dims,p,trials,p_hat,ci_lo,ci_hi,seed,runtime_ms");
    const std::string row = estimate_csv_row(e);
    CHECK(row.substr(0, 33) == "filled,8x8,0.125,10,0.5,0.25,0.75");
}

TEST_CASE("single-inequality validation smoke checks") {
    const ValidationReport gap =
        validate_inequality("double-gap", {{"dims", {12, 8}}, {"p", 0.1}}, 4000, 3, 2);
    CHECK(gap.verdict != "FAIL");
    CHECK(gap.bound > 0.0);

    const ValidationReport vbk = validate_inequality(
        "vbk", {{"n", 4}, {"p", 0.3}, {"m1", 2}, {"m2", 2}}, 4000, 3, 2);
    CHECK(vbk.verdict != "FAIL");

    CHECK_THROWS(validate_inequality("no-such-check", {}, 10, 1, 1));
}

TEST_CASE("validation suite runs and never fails at modest sizes") {
    const auto reports = validation_suite(3000, 11, 4);
    CHECK(reports.size() >= 5);
    for (const auto& r : reports) {
        CHECK(r.verdict != "FAIL");
        CHECK((r.verdict == "PASS" || r.verdict == "UNKNOWN"));
    }
}
