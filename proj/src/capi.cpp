#include "bperc.h"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bperc/droplet_events.hpp"
#include "bperc/dynamics.hpp"
#include "bperc/hierarchy.hpp"
#include "bperc/lattice.hpp"
#include "bperc/montecarlo.hpp"
#include "bperc/numerics.hpp"

using nlohmann::json;

struct bperc_config {
    bperc::Config value;
};

namespace {

thread_local std::string g_last_error = "ok";

char* dup_string(const std::string& s) {
    char* out = (char*)std::malloc(s.size() + 1);
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
bperc_status guard(Fn&& fn) {
    try {
        fn();
        return BPERC_OK;
    } catch (const json::exception& e) {
        g_last_error = e.what();
        return BPERC_ERR_PARSE;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return BPERC_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BPERC_ERR_INTERNAL;
    }
}

bperc::Constants constants_of(const json& req) {
    return req.contains("constants") ? req.at("constants").get<bperc::Constants>()
                                     : bperc::Constants{};
}

std::uint64_t seed_of(const json& req) { return req.value("seed", (std::uint64_t)1); }
long long trials_of(const json& req) { return req.value("trials", (long long)1000); }
int workers_of(const json& req) { return req.value("workers", 1); }

json run_sim(const json& req) {
    const bperc::Config input = bperc::config_from_json(req.at("config"));
    const bperc::Config closed = bperc::closure(input);
    return json{{"config", closed},
                {"count", closed.count()},
                {"percolates", closed.count() == input.domain().area()}};
}

json run_pc(const json& req) {
    const auto ns = req.at("n").get<std::vector<int>>();
    const double tol = req.value("tol", 1e-3);
    json rows = json::array();
    for (int n : ns)
        rows.push_back(
            bperc::estimate_pc(n, trials_of(req), tol, seed_of(req), workers_of(req)));
    return json{{"estimates", std::move(rows)}};
}

json run_event_prob(const json& req) {
    const std::string name = req.at("event").get<std::string>();
    const double p = req.at("p").get<double>();
    const long long trials = trials_of(req);
    const std::uint64_t seed = seed_of(req);
    const int workers = workers_of(req);

    if (name == "D1" || name == "D2") {
        const bperc::FrameSpec spec = bperc::frame_spec_from_json(req.at("spec"));
        const auto ev = [&](const bperc::Config& c) {
            return name == "D1" ? bperc::event_D1(c, spec) : bperc::event_D2(c, spec);
        };
        return json{{"estimate",
                     bperc::estimate_event(name, ev, p, spec.r, trials, seed, workers)}};
    }
    const auto dims = req.at("dims").get<std::vector<int>>();
    const bperc::Rect r = bperc::make_rect(0, dims.at(0) - 1, 0, dims.at(1) - 1);
    std::function<bool(const bperc::Config&)> ev;
    if (name == "filled")
        ev = [&](const bperc::Config& c) { return bperc::is_internally_filled(c, r); };
    else if (name == "percolation")
        ev = [&](const bperc::Config& c) { return bperc::closure(c).count() == r.area(); };
    else if (name == "crossing")
        ev = [&](const bperc::Config& c) { return bperc::crossed(c, r, bperc::Direction::PlusX); };
    else if (name == "double-gap")
        ev = [&](const bperc::Config& c) {
            return !bperc::double_gap(c, r, bperc::Axis::X).has_value();
        };
    else
        throw std::invalid_argument("bperc: unknown event: " + name);
    return json{{"estimate", bperc::estimate_event(name, ev, p, r, trials, seed, workers)}};
}

json run_bound(const json& req) {
    const std::string kind = req.at("kind").get<std::string>();
    const bperc::Constants k = constants_of(req);
    if (kind == "droplet" || kind == "seeds" || kind == "crossing") {
        const auto dims = req.at("dims").get<std::vector<int>>();
        const bperc::Rect r = bperc::make_rect(0, dims.at(0) - 1, 0, dims.at(1) - 1);
        if (kind == "droplet") return json{{"report", bperc::droplet_bound(r, k)}};
        if (kind == "seeds") return json{{"report", bperc::seeds_bound(r, k)}};
        const auto [gap, cross] = bperc::crossing_bounds(r, k);
        return json{{"no_double_gap", gap}, {"crossed", cross}};
    }
    if (kind == "frame-event") {
        const bperc::FrameSpec spec = bperc::frame_spec_from_json(req.at("spec"));
        return json{{"report", bperc::cor_key_bound(spec, req.value("j", 1), k)}};
    }
    if (kind == "leaving-diagonal") {
        const auto dims = req.at("dims").get<std::vector<int>>();
        return json{{"report", bperc::leaving_diagonal_check(dims.at(0), dims.at(1), k)}};
    }
    if (kind == "pc-lower")
        return json{{"report", bperc::pc_lower_bound(req.at("n").get<long long>(), k)}};
    throw std::invalid_argument("bperc: unknown bound kind: " + kind);
}

json run_g_table(const json& req) {
    const double lo = req.value("z_lo", 0.01);
    const double hi = req.value("z_hi", 5.0);
    const int count = req.value("count", 100);
    if (!(lo > 0 && hi > lo && count >= 2))
        throw std::invalid_argument("bperc: need 0 < z_lo < z_hi and count >= 2");
    json rows = json::array();
    for (int i = 0; i < count; ++i) {
        const double z = lo + (hi - lo) * i / (count - 1);
        rows.push_back(
            {{"z", z}, {"g", bperc::g(z)}, {"integral_0_z", bperc::g_integral(0, z)}});
    }
    return json{{"rows", std::move(rows)}, {"lambda", bperc::lambda()}};
}

json run_hier_build(const json& req) {
    bperc::Config a = [&] {
        if (req.contains("config")) return bperc::config_from_json(req.at("config"));
        // Rejection-sample a single internally filled droplet.
        const auto& s = req.at("sample");
        const auto dims = s.at("dims").get<std::vector<int>>();
        const bperc::Rect rect = bperc::make_rect(0, dims.at(0) - 1, 0, dims.at(1) - 1);
        auto fs = bperc::estimate_filled_conditioned(rect, s.at("p").get<double>(), 1,
                                                     seed_of(req));
        if (fs.configs.empty())
            throw std::invalid_argument("bperc: sampling budget exhausted before a fill");
        return std::move(fs.configs.front());
    }();
    const bperc::Rect r =
        req.contains("rect") ? req.at("rect").get<bperc::Rect>() : a.domain();
    const bperc::Constants k = constants_of(req);
    const bperc::Hierarchy h = bperc::build_hierarchy(a, r, k);
    return json{{"hierarchy", h},
                {"good", bperc::check_good(h, k)},
                {"certificate", bperc::check_satisfied(h, a)},
                {"stats", bperc::stats(h, k)}};
}

json run_hier_check(const json& req) {
    const bperc::Hierarchy h = bperc::hierarchy_from_json(req.at("hierarchy"));
    const bperc::Constants k = constants_of(req);
    json out{{"good", bperc::check_good(h, k)}, {"stats", bperc::stats(h, k)}};
    if (req.contains("config")) {
        const bperc::Config a = bperc::config_from_json(req.at("config"));
        out["certificate"] = bperc::check_satisfied(h, a);
    }
    return out;
}

json run_validate(const json& req) {
    std::vector<bperc::ValidationReport> reports;
    if (req.value("suite", "") == "all" || !req.contains("name")) {
        reports = bperc::validation_suite(trials_of(req), seed_of(req), workers_of(req));
    } else {
        reports.push_back(bperc::validate_inequality(req.at("name").get<std::string>(),
                                                     req.value("params", json::object()),
                                                     trials_of(req), seed_of(req),
                                                     workers_of(req)));
    }
    bool any_fail = false;
    for (const auto& r : reports) any_fail = any_fail || r.verdict == "FAIL";
    return json{{"reports", reports}, {"any_fail", any_fail}};
}

}  // namespace

extern "C" {

const char* bperc_last_error(void) { return g_last_error.c_str(); }

void bperc_string_free(char* s) { std::free(s); }

bperc_status bperc_config_parse(const char* text, bperc_config** out) {
    if (!text || !out) {
        g_last_error = "null argument";
        return BPERC_ERR_INVALID_ARGUMENT;
    }
    return guard([&] {
        *out = new bperc_config{bperc::config_from_json(json::parse(text))};
    });
}

void bperc_config_free(bperc_config* c) { delete c; }

bperc_status bperc_config_dump(const bperc_config* c, char** json_out) {
    if (!c || !json_out) {
        g_last_error = "null argument";
        return BPERC_ERR_INVALID_ARGUMENT;
    }
    return guard([&] { *json_out = dup_string(json(c->value).dump()); });
}

bperc_status bperc_config_closure(const bperc_config* c, bperc_config** out) {
    if (!c || !out) {
        g_last_error = "null argument";
        return BPERC_ERR_INVALID_ARGUMENT;
    }
    return guard([&] { *out = new bperc_config{bperc::closure(c->value)}; });
}

bperc_status bperc_config_count(const bperc_config* c, long long* out) {
    if (!c || !out) {
        g_last_error = "null argument";
        return BPERC_ERR_INVALID_ARGUMENT;
    }
    *out = c->value.count();
    return BPERC_OK;
}

bperc_status bperc_run(const char* op, const char* request_json, char** response_json) {
    if (!op || !request_json || !response_json) {
        g_last_error = "null argument";
        return BPERC_ERR_INVALID_ARGUMENT;
    }
    return guard([&] {
        const json req = json::parse(request_json);
        const std::string name = op;
        json res;
        if (name == "sim")
            res = run_sim(req);
        else if (name == "pc")
            res = run_pc(req);
        else if (name == "event-prob")
            res = run_event_prob(req);
        else if (name == "bound")
            res = run_bound(req);
        else if (name == "g-table")
            res = run_g_table(req);
        else if (name == "hier-build")
            res = run_hier_build(req);
        else if (name == "hier-check")
            res = run_hier_check(req);
        else if (name == "validate")
            res = run_validate(req);
        else
            throw std::invalid_argument("bperc: unknown operation: " + name);
        *response_json = dup_string(res.dump());
    });
}

}  // extern "C"
