#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bperc/droplet_events.hpp"
#include "bperc/dynamics.hpp"
#include "bperc/lattice.hpp"
#include "bperc/numerics.hpp"

namespace bperc {

struct Estimate {
    std::string event;
    std::string n_or_dims;
    double p = 0;
    long long trials = 0;
    double p_hat = 0;
    double ci_lo = 0, ci_hi = 1;  // 95% Wilson
    std::uint64_t seed = 0;
    double runtime_ms = 0;
};

void to_json(nlohmann::json& j, const Estimate& e);
std::string estimate_csv_header();
std::string estimate_csv_row(const Estimate& e);

struct Wilson {
    double lo = 0, hi = 1;
};
Wilson wilson_interval(long long hits, long long trials);

// Counter-based generator: every draw is a pure function of (key, counter),
// so trials are reproducible and order-independent.
class Substream {
  public:
    explicit Substream(std::uint64_t key) : key_(key) {}
    std::uint64_t next_u64();
    double next_double();  // uniform in [0, 1)

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

class TrialStream {
  public:
    explicit TrialStream(std::uint64_t seed, std::uint64_t stream = 0);
    Substream at(std::uint64_t index) const;       // independent per-trial substream
    TrialStream fork(std::uint64_t tag) const;     // fresh stream, e.g. per bisection probe
    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

Config sample_config(double p, const Rect& r, const TrialStream& stream, std::uint64_t index);

Estimate estimate_event(const std::string& name, const std::function<bool(const Config&)>& event,
                        double p, const Rect& r, long long trials, std::uint64_t seed,
                        int workers = 1);

// Bisection of the estimated percolation probability of [n]^2 against 1/2,
// with a fresh substream per probe. The interval brackets the probes whose
// Wilson intervals confidently sit on one side of 1/2.
Estimate estimate_pc(int n, long long trials_per_step, double tol, std::uint64_t seed,
                     int workers = 1);

struct FilledSample {
    Estimate acceptance;  // acceptance rate of the rejection sampler
    std::vector<Config> configs;
    bool partial = false;
    long long attempts = 0;
};

FilledSample estimate_filled_conditioned(const Rect& r, double p, long long wanted,
                                         std::uint64_t seed, long long attempt_budget = 10000000);

struct ValidationReport {
    std::string name;
    std::string verdict;  // "PASS", "FAIL", "UNKNOWN"
    double empirical = 0, ci_lo = 0, ci_hi = 0;
    double bound = 0, slack = 0;
    nlohmann::json params;
    std::vector<std::pair<std::string, bool>> preconditions;
};

void to_json(nlohmann::json& j, const ValidationReport& r);

// Checks one probability inequality empirically: PASS iff the observed
// frequency is at most the bound plus three Wilson standard errors, UNKNOWN
// when the bound is vacuous (>= 1). Names and parameters:
//   "double-gap"  {dims:[a,b], p}            no vertical double gap
//   "crossing"    {dims:[a,b], p}            crossed left to right
//   "seeds"       {dims:[a,b], p}            small droplet internally filled
//   "frame-event" {spec, j, constants, p?}   growth event through a frame
//   "vbk"         {n, p, m1, m2}             disjoint occurrence of two
//                                            increasing site-count events
ValidationReport validate_inequality(const std::string& name, const nlohmann::json& params,
                                     long long trials, std::uint64_t seed, int workers = 1);

// The documented default parameter sets, one report per check.
std::vector<ValidationReport> validation_suite(long long trials, std::uint64_t seed,
                                               int workers = 1);

}  // namespace bperc
