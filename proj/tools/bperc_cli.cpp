// Command-line front end. All real work happens behind the C API in
// libbperc; this file only assembles JSON requests from flags and formats
// the responses as JSON or CSV.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bperc.h"

using nlohmann::json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 1;
    long long trials = 1000;
    int workers = 1;
    std::string constants_file;
    std::string out = "-";
    std::string format = "json";
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

json run_config_of(const std::string& command, const GlobalOpts& g, const json& args,
                   const json& constants) {
    return json{{"command", command}, {"seed", g.seed},     {"trials", g.trials},
                {"workers", g.workers}, {"format", g.format}, {"constants", constants},
                {"args", args}};
}

// Calls through the C API and returns the parsed response.
json call(const std::string& op, const json& request) {
    char* response = nullptr;
    const bperc_status rc = bperc_run(op.c_str(), request.dump().c_str(), &response);
    if (rc != BPERC_OK) {
        const std::string msg = bperc_last_error();
        throw std::runtime_error(msg);
    }
    json out = json::parse(response);
    bperc_string_free(response);
    return out;
}

void write_output(const GlobalOpts& g, const std::string& text) {
    if (g.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(g.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + g.out);
    out << text;
}

std::string csv_escape_comment(const json& run_config) {
    return "# run_config " + run_config.dump() + "\n";
}

std::string estimate_csv(const json& e) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%lld,%.10g,%.10g,%.10g,%llu,%.3f",
                  e.at("event").get<std::string>().c_str(),
                  e.at("n_or_dims").get<std::string>().c_str(), e.at("p").get<double>(),
                  e.at("trials").get<long long>(), e.at("p_hat").get<double>(),
                  e.at("ci_lo").get<double>(), e.at("ci_hi").get<double>(),
                  (unsigned long long)e.at("seed").get<std::uint64_t>(),
                  e.at("runtime_ms").get<double>());
    return buf;
}

void emit(const GlobalOpts& g, const json& run_config, const json& result,
          const std::string& csv_body) {
    if (g.format == "json") {
        json doc{{"run_config", run_config}, {"result", result}};
        write_output(g, doc.dump(2) + "\n");
    } else {
        if (csv_body.empty())
            throw CLI::ValidationError("--format csv is not available for this subcommand");
        write_output(g, csv_escape_comment(run_config) + csv_body);
    }
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    if (out.empty()) throw CLI::ValidationError("empty list: " + s);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bootstrap-percolation workbench: simulation, estimation, and rigorous bounds"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOpts g;
    app.add_option("--seed", g.seed, "Master RNG seed");
    app.add_option("--trials", g.trials, "Monte Carlo trials");
    app.add_option("--workers", g.workers, "Worker threads");
    app.add_option("--constants", g.constants_file, "JSON file of model constants");
    app.add_option("--out", g.out, "Output path ('-' for stdout)");
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));

    // sim
    std::string sim_config;
    auto* sim = app.add_subcommand("sim", "Closure of a configuration");
    sim->add_option("--config", sim_config, "Configuration JSON file")->required();

    // pc
    std::string pc_ns = "64";
    double pc_tol = 1e-3;
    auto* pc = app.add_subcommand("pc", "Critical-probability bisection over grid sizes");
    pc->add_option("--n", pc_ns, "Comma-separated grid sides");
    pc->add_option("--tol", pc_tol, "Bisection bracket tolerance");

    // event-prob
    std::string ep_event, ep_dims, ep_spec;
    double ep_p = 0.1;
    auto* ep = app.add_subcommand("event-prob", "Monte Carlo probability of a named event");
    ep->add_option("--event", ep_event,
                   "filled | percolation | crossing | double-gap | D1 | D2")
        ->required();
    ep->add_option("--dims", ep_dims, "Rectangle dimensions a,b");
    ep->add_option("--spec", ep_spec, "Frame specification JSON file (for D1/D2)");
    ep->add_option("--p", ep_p, "Infection probability");

    // bound
    std::string bd_kind, bd_dims, bd_spec;
    long long bd_n = 0;
    int bd_j = 1;
    auto* bd = app.add_subcommand("bound", "Evaluate a rigorous probability bound");
    bd->add_option("--kind", bd_kind,
                   "droplet | seeds | crossing | frame-event | leaving-diagonal | pc-lower")
        ->required();
    bd->add_option("--dims", bd_dims, "Rectangle dimensions a,b");
    bd->add_option("--spec", bd_spec, "Frame specification JSON file");
    bd->add_option("--n", bd_n, "Grid side (pc-lower)");
    bd->add_option("--j", bd_j, "Criticality index (frame-event)");

    // g-table
    double gt_lo = 0.01, gt_hi = 5.0;
    int gt_count = 100;
    auto* gt = app.add_subcommand("g-table", "Table of the threshold integrand");
    gt->add_option("--z-lo", gt_lo, "Smallest z");
    gt->add_option("--z-hi", gt_hi, "Largest z");
    gt->add_option("--count", gt_count, "Number of rows");

    // hier build|check
    auto* hier = app.add_subcommand("hier", "Growth hierarchies");
    hier->require_subcommand(1);
    std::string hb_config, hb_dims;
    double hb_p = 0.1;
    auto* hb = hier->add_subcommand("build", "Build from a filled droplet");
    hb->add_option("--config", hb_config, "Configuration JSON file");
    hb->add_option("--sample-dims", hb_dims, "Rejection-sample a filled a,b droplet instead");
    hb->add_option("--p", hb_p, "Infection probability for sampling");
    std::string hc_hier, hc_config;
    auto* hc = hier->add_subcommand("check", "Check a hierarchy file");
    hc->add_option("--hier", hc_hier, "Hierarchy JSON file")->required();
    hc->add_option("--config", hc_config, "Configuration JSON file (adds event checks)");

    // validate
    std::string va_suite = "all", va_name, va_params;
    auto* va = app.add_subcommand("validate", "Empirical checks of the probability bounds");
    va->add_option("--suite", va_suite, "Named suite (all)");
    va->add_option("--name", va_name, "Single inequality name");
    va->add_option("--params", va_params, "Inline JSON parameters for --name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        json constants = json::object();
        if (!g.constants_file.empty()) constants = load_json_file(g.constants_file);
        json base{{"seed", g.seed}, {"trials", g.trials}, {"workers", g.workers}};
        if (!constants.empty()) base["constants"] = constants;

        if (*sim) {
            json req = base;
            req["config"] = load_json_file(sim_config);
            const json res = call("sim", req);
            emit(g, run_config_of("sim", g, {{"config", sim_config}}, constants), res, "");
            return 0;
        }
        if (*pc) {
            json req = base;
            req["n"] = parse_int_list(pc_ns);
            req["tol"] = pc_tol;
            const json res = call("pc", req);
            std::string csv = "event,n_or_dims,p,trials,p_hat,ci_lo,ci_hi,seed,runtime_ms\n";
            for (const auto& e : res.at("estimates")) csv += estimate_csv(e) + "\n";
            emit(g, run_config_of("pc", g, {{"n", pc_ns}, {"tol", pc_tol}}, constants), res,
                 csv);
            return 0;
        }
        if (*ep) {
            json req = base;
            req["event"] = ep_event;
            req["p"] = ep_p;
            if (!ep_dims.empty()) req["dims"] = parse_int_list(ep_dims);
            if (!ep_spec.empty()) req["spec"] = load_json_file(ep_spec);
            const json res = call("event-prob", req);
            std::string csv = "event,n_or_dims,p,trials,p_hat,ci_lo,ci_hi,seed,runtime_ms\n";
            csv += estimate_csv(res.at("estimate")) + "\n";
            emit(g,
                 run_config_of("event-prob", g,
                               {{"event", ep_event}, {"dims", ep_dims}, {"p", ep_p}},
                               constants),
                 res, csv);
            return 0;
        }
        if (*bd) {
            json req = base;
            req["kind"] = bd_kind;
            req["j"] = bd_j;
            if (!bd_dims.empty()) req["dims"] = parse_int_list(bd_dims);
            if (!bd_spec.empty()) req["spec"] = load_json_file(bd_spec);
            if (bd_n > 0) req["n"] = bd_n;
            const json res = call("bound", req);
            emit(g,
                 run_config_of("bound", g, {{"kind", bd_kind}, {"dims", bd_dims}, {"n", bd_n}},
                               constants),
                 res, "");
            return 0;
        }
        if (*gt) {
            json req = base;
            req["z_lo"] = gt_lo;
            req["z_hi"] = gt_hi;
            req["count"] = gt_count;
            const json res = call("g-table", req);
            std::string csv = "z,g,integral_0_z\n";
            for (const auto& row : res.at("rows")) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n",
                              row.at("z").get<double>(), row.at("g").get<double>(),
                              row.at("integral_0_z").get<double>());
                csv += buf;
            }
            emit(g,
                 run_config_of("g-table", g,
                               {{"z_lo", gt_lo}, {"z_hi", gt_hi}, {"count", gt_count}},
                               constants),
                 res, csv);
            return 0;
        }
        if (*hb) {
            json req = base;
            if (!hb_config.empty()) {
                req["config"] = load_json_file(hb_config);
            } else if (!hb_dims.empty()) {
                req["sample"] = {{"dims", parse_int_list(hb_dims)}, {"p", hb_p}};
            } else {
                throw CLI::ValidationError("hier build needs --config or --sample-dims");
            }
            const json res = call("hier-build", req);
            emit(g,
                 run_config_of("hier build", g,
                               {{"config", hb_config}, {"sample_dims", hb_dims}, {"p", hb_p}},
                               constants),
                 res, "");
            return 0;
        }
        if (*hc) {
            json req = base;
            req["hierarchy"] = load_json_file(hc_hier);
            if (!hc_config.empty()) req["config"] = load_json_file(hc_config);
            const json res = call("hier-check", req);
            const bool good = res.at("good").at("good").get<bool>();
            bool sat = true;
            if (res.contains("certificate"))
                sat = res.at("certificate").at("satisfied").get<bool>();
            emit(g,
                 run_config_of("hier check", g, {{"hier", hc_hier}, {"config", hc_config}},
                               constants),
                 res, "");
            return good && sat ? 0 : 1;
        }
        if (*va) {
            json req = base;
            if (!va_name.empty()) {
                req["name"] = va_name;
                if (!va_params.empty()) req["params"] = json::parse(va_params);
            } else {
                req["suite"] = va_suite;
            }
            const json res = call("validate", req);
            std::string csv = "name,verdict,empirical,ci_lo,ci_hi,bound,slack\n";
            for (const auto& r : res.at("reports")) {
                char buf[256];
                std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                              r.at("name").get<std::string>().c_str(),
                              r.at("verdict").get<std::string>().c_str(),
                              r.at("empirical").get<double>(), r.at("ci_lo").get<double>(),
                              r.at("ci_hi").get<double>(), r.at("bound").get<double>(),
                              r.at("slack").get<double>());
                csv += buf;
            }
            emit(g,
                 run_config_of("validate", g, {{"suite", va_suite}, {"name", va_name}},
                               constants),
                 res, csv);
            return res.at("any_fail").get<bool>() ? 1 : 0;
        }
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
