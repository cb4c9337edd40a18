#include "bperc/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace bperc {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t combine(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b)); }

double now_ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

Wilson wilson_interval(long long hits, long long trials) {
    if (trials < 1) throw std::invalid_argument("bperc: interval needs at least one trial");
    const double n = (double)trials;
    const double phat = (double)hits / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double centre = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        kZ95 * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    // Zero and full counts pin the corresponding endpoint exactly; the
    // closed form only reaches them up to rounding.
    const double lo = hits == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = hits == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

std::uint64_t Substream::next_u64() { return combine(key_, counter_++); }

double Substream::next_double() { return (double)(next_u64() >> 11) * 0x1.0p-53; }

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

Substream TrialStream::at(std::uint64_t index) const {
    return Substream(combine(combine(seed_, stream_), index));
}

TrialStream TrialStream::fork(std::uint64_t tag) const {
    return TrialStream(seed_, combine(stream_, ~tag));
}

Config sample_config(double p, const Rect& r, const TrialStream& stream, std::uint64_t index) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bperc: p must lie in [0,1]");
    Substream s = stream.at(index);
    Config c(r);
    for (int y = r.y_lo; y <= r.y_hi; ++y)
        for (int x = r.x_lo; x <= r.x_hi; ++x)
            if (s.next_double() < p) c.set(x, y, true);
    return c;
}

namespace {

long long count_hits(const std::function<bool(const Config&)>& event, double p, const Rect& r,
                     const TrialStream& stream, long long trials, int workers) {
    workers = std::max(1, workers);
    if (workers == 1) {
        long long hits = 0;
        for (long long i = 0; i < trials; ++i)
            if (event(sample_config(p, r, stream, (std::uint64_t)i))) ++hits;
        return hits;
    }
    std::vector<long long> partial(workers, 0);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            const long long lo = trials * w / workers, hi = trials * (w + 1) / workers;
            long long hits = 0;
            for (long long i = lo; i < hi; ++i)
                if (event(sample_config(p, r, stream, (std::uint64_t)i))) ++hits;
            partial[w] = hits;
        });
    for (auto& t : pool) t.join();
    long long hits = 0;
    for (long long h : partial) hits += h;
    return hits;
}

}  // namespace

Estimate estimate_event(const std::string& name, const std::function<bool(const Config&)>& event,
                        double p, const Rect& r, long long trials, std::uint64_t seed,
                        int workers) {
    if (trials < 1) throw std::invalid_argument("bperc: need at least one trial");
    const auto t0 = std::chrono::steady_clock::now();
    const TrialStream stream(seed);
    const long long hits = count_hits(event, p, r, stream, trials, workers);
    Estimate e;
    e.event = name;
    e.n_or_dims = std::to_string(r.width()) + "x" + std::to_string(r.height());
    e.p = p;
    e.trials = trials;
    e.p_hat = (double)hits / (double)trials;
    const Wilson w = wilson_interval(hits, trials);
    e.ci_lo = w.lo;
    e.ci_hi = w.hi;
    e.seed = seed;
    e.runtime_ms = now_ms_since(t0);
    return e;
}

Estimate estimate_pc(int n, long long trials_per_step, double tol, std::uint64_t seed,
                     int workers) {
    if (n < 2) throw std::invalid_argument("bperc: grid side must be at least 2");
    if (!(tol > 0)) throw std::invalid_argument("bperc: tolerance must be positive");
    if (trials_per_step < 1) throw std::invalid_argument("bperc: need at least one trial");
    const auto t0 = std::chrono::steady_clock::now();
    const Rect grid = make_rect(0, n - 1, 0, n - 1);
    const auto percolates = [&](const Config& c) { return closure(c).count() == grid.area(); };
    double lo = 0.0, hi = 1.0, ci_lo = 0.0, ci_hi = 1.0;
    long long total = 0;
    const TrialStream base(seed);
    for (int probe = 0; hi - lo > tol && probe < 64; ++probe) {
        const double mid = 0.5 * (lo + hi);
        const long long hits =
            count_hits(percolates, mid, grid, base.fork((std::uint64_t)probe), trials_per_step,
                       workers);
        total += trials_per_step;
        const double frac = (double)hits / (double)trials_per_step;
        const Wilson w = wilson_interval(hits, trials_per_step);
        if (w.hi < 0.5) ci_lo = std::max(ci_lo, mid);
        if (w.lo > 0.5) ci_hi = std::min(ci_hi, mid);
        (frac >= 0.5 ? hi : lo) = mid;
    }
    Estimate e;
    e.event = "pc";
    e.n_or_dims = std::to_string(n);
    e.trials = total;
    e.p_hat = 0.5 * (lo + hi);
    e.p = e.p_hat;
    e.ci_lo = ci_lo;
    e.ci_hi = ci_hi;
    e.seed = seed;
    e.runtime_ms = now_ms_since(t0);
    return e;
}

FilledSample estimate_filled_conditioned(const Rect& r, double p, long long wanted,
                                         std::uint64_t seed, long long attempt_budget) {
    if (wanted < 1) throw std::invalid_argument("bperc: need at least one accepted sample");
    const auto t0 = std::chrono::steady_clock::now();
    const TrialStream stream(seed);
    FilledSample out;
    long long hits = 0;
    while ((long long)out.configs.size() < wanted && out.attempts < attempt_budget) {
        Config c = sample_config(p, r, stream, (std::uint64_t)out.attempts++);
        if (is_internally_filled(c, r)) {
            ++hits;
            out.configs.push_back(std::move(c));
        }
    }
    out.partial = (long long)out.configs.size() < wanted;
    out.acceptance.event = "filled-acceptance";
    out.acceptance.n_or_dims = std::to_string(r.width()) + "x" + std::to_string(r.height());
    out.acceptance.p = p;
    out.acceptance.trials = std::max<long long>(out.attempts, 1);
    out.acceptance.p_hat = (double)hits / (double)out.acceptance.trials;
    const Wilson w = wilson_interval(hits, out.acceptance.trials);
    out.acceptance.ci_lo = w.lo;
    out.acceptance.ci_hi = w.hi;
    out.acceptance.seed = seed;
    out.acceptance.runtime_ms = now_ms_since(t0);
    return out;
}

namespace {

// P(Bin(n, p) >= m), exact up to floating point.
double binomial_tail(int n, double p, int m) {
    if (m <= 0) return 1.0;
    if (m > n) return 0.0;
    double sum = 0.0;
    for (int k = m; k <= n; ++k) {
        const double lg = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                          std::lgamma(n - k + 1.0) + k * std::log(p) +
                          (n - k) * std::log1p(-p);
        sum += std::exp(lg);
    }
    return std::min(1.0, sum);
}

ValidationReport finish_report(ValidationReport rep, const Estimate& est, double bound) {
    rep.empirical = est.p_hat;
    rep.ci_lo = est.ci_lo;
    rep.ci_hi = est.ci_hi;
    rep.bound = bound;
    rep.slack = 3.0 * (est.ci_hi - est.ci_lo) / (2.0 * kZ95);
    bool pre_ok = true;
    for (const auto& [name, held] : rep.preconditions) pre_ok = pre_ok && held;
    if (!pre_ok || !(bound < 1.0))
        rep.verdict = "UNKNOWN";
    else
        rep.verdict = est.p_hat <= bound + rep.slack ? "PASS" : "FAIL";
    return rep;
}

}  // namespace

ValidationReport validate_inequality(const std::string& name, const nlohmann::json& params,
                                     long long trials, std::uint64_t seed, int workers) {
    ValidationReport rep;
    rep.name = name;
    rep.params = params;
    if (name == "double-gap" || name == "crossing") {
        const auto dims = params.at("dims").get<std::vector<int>>();
        const double p = params.at("p").get<double>();
        const Rect r = make_rect(0, dims.at(0) - 1, 0, dims.at(1) - 1);
        Constants k;
        k.p = p;
        const auto bounds = crossing_bounds(r, k);
        const bool gap_check = name == "double-gap";
        const double bound = gap_check ? bounds.first.value : bounds.second.value;
        const auto event = [&](const Config& c) {
            return gap_check ? !double_gap(c, r, Axis::X).has_value()
                             : crossed(c, r, Direction::PlusX);
        };
        return finish_report(std::move(rep), estimate_event(name, event, p, r, trials, seed, workers),
                             bound);
    }
    if (name == "seeds") {
        const auto dims = params.at("dims").get<std::vector<int>>();
        const double p = params.at("p").get<double>();
        Constants k = params.contains("constants") ? params.at("constants").get<Constants>()
                                                   : Constants{};
        k.p = p;
        const Rect r = make_rect(0, dims.at(0) - 1, 0, dims.at(1) - 1);
        const BoundReport b = seeds_bound(r, k);
        rep.preconditions = b.preconditions;
        rep.preconditions.push_back({"a_le_b", r.width() <= r.height()});
        const auto event = [&](const Config& c) { return is_internally_filled(c, r); };
        return finish_report(std::move(rep), estimate_event(name, event, p, r, trials, seed, workers),
                             b.value);
    }
    if (name == "frame-event") {
        const FrameSpec spec = frame_spec_from_json(params.at("spec"));
        const int j = params.at("j").get<int>();
        Constants k = params.at("constants").get<Constants>();
        if (params.contains("p")) k.p = params.at("p").get<double>();
        const BoundReport b = cor_key_bound(spec, j, k);
        rep.preconditions = b.preconditions;
        const auto event = [&](const Config& c) {
            return j == 1 ? event_D1(c, spec) : event_D2(c, spec);
        };
        return finish_report(
            std::move(rep),
            estimate_event(name, event, k.p, spec.r, trials, seed, workers), b.value);
    }
    if (name == "vbk") {
        const int n = params.at("n").get<int>();
        const double p = params.at("p").get<double>();
        const int m1 = params.at("m1").get<int>();
        const int m2 = params.at("m2").get<int>();
        rep.preconditions = {{"m1_ge_1", m1 >= 1}, {"m2_ge_1", m2 >= 1}, {"n_ge_1", n >= 1}};
        const Rect r = make_rect(0, n - 1, 0, n - 1);
        // Disjoint occurrence of {|A| >= m1} and {|A| >= m2} is exactly
        // {|A| >= m1 + m2}; the product bound is computed from the exact
        // binomial tails.
        const double bound =
            binomial_tail(n * n, p, m1) * binomial_tail(n * n, p, m2);
        const auto event = [&](const Config& c) { return c.count() >= m1 + m2; };
        return finish_report(std::move(rep), estimate_event(name, event, p, r, trials, seed, workers),
                             bound);
    }
    throw std::invalid_argument("bperc: unknown inequality name: " + name);
}

std::vector<ValidationReport> validation_suite(long long trials, std::uint64_t seed, int workers) {
    std::vector<ValidationReport> out;
    out.push_back(validate_inequality("double-gap", {{"dims", {20, 10}}, {"p", 0.1}}, trials,
                                      seed, workers));
    out.push_back(
        validate_inequality("crossing", {{"dims", {20, 10}}, {"p", 0.1}}, trials, seed, workers));
    // Small enough p that the seed bound is non-vacuous (at p = 0.05 it
    // exceeds one and the verdict would be UNKNOWN by the vacuity rule).
    out.push_back(
        validate_inequality("seeds", {{"dims", {4, 4}}, {"p", 0.01}}, trials, seed, workers));
    // Desk-scale frame-event parameters: q = 0.01 keeps a 12x12 droplet in
    // the first criticality window under these small documented constants.
    Constants small;
    small.p = -std::expm1(-0.01);
    small.B = 1.05;
    small.C = 1.25;
    small.delta = 0.9;
    small.L1 = 2;
    small.L2 = 20;
    small.L3 = 200;
    small.L4 = 2000;
    small.L5 = 20000;
    small.L6 = 200000;
    const Rect r12 = make_rect(0, 11, 0, 11);
    const Rect s10 = make_rect(1, 10, 1, 10);
    nlohmann::json spec0 = FrameSpec(s10, r12, XLabel{});
    out.push_back(validate_inequality(
        "frame-event", {{"spec", spec0}, {"j", 1}, {"constants", small}}, trials, seed, workers));
    XLabel one_side;
    one_side[Direction::PlusX] = 1;
    nlohmann::json spec1 = FrameSpec(s10, r12, one_side);
    out.push_back(validate_inequality(
        "frame-event", {{"spec", spec1}, {"j", 1}, {"constants", small}}, trials, seed, workers));
    out.push_back(validate_inequality(
        "vbk", {{"n", 5}, {"p", 0.3}, {"m1", 2}, {"m2", 3}}, trials, seed, workers));
    return out;
}

void to_json(nlohmann::json& j, const Estimate& e) {
    j = nlohmann::json{{"event", e.event},     {"n_or_dims", e.n_or_dims},
                       {"p", e.p},             {"trials", e.trials},
                       {"p_hat", e.p_hat},     {"ci_lo", e.ci_lo},
                       {"ci_hi", e.ci_hi},     {"seed", e.seed},
                       {"runtime_ms", e.runtime_ms}};
}

std::string estimate_csv_header() {
    return "event,n_or_dims,p,trials,p_hat,ci_lo,ci_hi,seed,runtime_ms";
}

std::string estimate_csv_row(const Estimate& e) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%lld,%.10g,%.10g,%.10g,%llu,%.3f",
                  e.event.c_str(), e.n_or_dims.c_str(), e.p, e.trials, e.p_hat, e.ci_lo, e.ci_hi,
                  (unsigned long long)e.seed, e.runtime_ms);
    return buf;
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
    nlohmann::json pre = nlohmann::json::object();
    for (const auto& [name, held] : r.preconditions) pre[name] = held;
    j = nlohmann::json{{"name", r.name},         {"verdict", r.verdict},
                       {"empirical", r.empirical}, {"ci_lo", r.ci_lo},
                       {"ci_hi", r.ci_hi},       {"bound", r.bound},
                       {"slack", r.slack},       {"params", r.params},
                       {"preconditions", std::move(pre)}};
}

}  // namespace bperc
