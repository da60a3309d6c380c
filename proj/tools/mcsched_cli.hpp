#pragma once

// The `mcsched` command line: sim, check and analyze. Kept in a header so the
// test suites can drive it in-process.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcs/mcs.hpp"

namespace mcs::cli {

enum ExitCode : int { ok = 0, usage = 1, violations = 2 };

namespace detail {

using io::json;

inline json read_json_file(const std::string& path, const char* what)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(std::string("cannot open ") + what + " '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(std::string("invalid JSON in ") + what + " '" + path + "': " + e.what());
    }
}

inline void print_findings(std::ostream& out, const Verdict& verdict)
{
    for (const auto& f : verdict.findings) {
        out << "FINDING [" << f.predicate << "] alpha=" << f.at.count() << " entry=" << f.index << ": " << f.detail
            << '\n';
    }
}

struct SimOptions {
    std::string workload;
    std::string policy;
    std::string scenario;
    std::optional<std::uint64_t> demand_seed;
    std::string trace;
    std::string format = "text";
};

inline int cmd_sim(const SimOptions& opt, std::ostream& out, std::ostream& err)
{
    RunConfig config;
    json header;
    try {
        config.workload = io::workload_from_json(read_json_file(opt.workload, "workload"));
        config.policy = parse_policy(opt.policy);
        header["policy"] = opt.policy;
        json digest_input{{"workload", io::workload_to_json(config.workload)}, {"policy", opt.policy}};
        if (!opt.scenario.empty()) {
            config.scenario = io::scenario_from_json(read_json_file(opt.scenario, "scenario"));
            validate(*config.scenario, config.workload);
            digest_input["scenario"] = io::scenario_to_json(*config.scenario);
        } else if (opt.demand_seed) {
            config.demand_seed = opt.demand_seed;
            digest_input["demand_seed"] = *opt.demand_seed;
        }
        header["config_digest"] = io::digest(digest_input.dump());
    } catch (const std::exception& e) {
        err << "sim: " << e.what() << '\n';
        return usage;
    }

    const Trace trace = run(config);
    {
        std::ofstream file(opt.trace, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "sim: cannot write trace '" << opt.trace << "'\n";
            return usage;
        }
        io::write_trace(file, trace, header);
    }

    const Verdict deadlines = check_deadlines(trace);
    const Mode final_mode = trace.entries.empty() ? Mode::optimistic : trace.entries.back().mode;
    if (opt.format == "json") {
        json outcomes = json::object();
        for (const auto& [id, o] : trace.outcomes) {
            json j{{"outcome", to_string(o.kind)}, {"at", o.at.count()}, {"d", o.deadline.count()},
                   {"crit", o.crit.is_hi() ? "HI" : "LO"}};
            j["finished"] = o.finished ? json(o.finished->count()) : json(nullptr);
            outcomes[id.str()] = std::move(j);
        }
        out << json{{"trace", opt.trace},
                    {"policy", opt.policy},
                    {"final_mode", to_string(final_mode)},
                    {"outcomes", outcomes},
                    {"deadlines", io::verdict_to_json(deadlines)}}
                   .dump(2)
            << '\n';
    } else {
        for (const auto& [id, o] : trace.outcomes) {
            out << id.str() << " (" << (o.crit.is_hi() ? "HI" : "LO") << ", d=" << o.deadline.count() << "): "
                << to_string(o.kind);
            if (o.finished) {
                out << " at t=" << o.finished->count();
            }
            out << '\n';
        }
        out << "final mode: " << to_string(final_mode) << '\n';
        print_findings(out, deadlines);
        out << "trace written to " << opt.trace << '\n';
    }
    return deadlines.pass() ? ok : violations;
}

inline const std::vector<std::string>& all_checks()
{
    static const std::vector<std::string> names{"p_t", "p_e", "inv_o", "inv_r", "guar", "rely", "deadline"};
    return names;
}

struct CheckOptions {
    std::string trace;
    std::string checks;
    std::string format = "text";
};

inline int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> selected;
    if (opt.checks.empty()) {
        selected = all_checks();
    } else {
        std::stringstream list(opt.checks);
        std::string name;
        while (std::getline(list, name, ',')) {
            if (std::find(all_checks().begin(), all_checks().end(), name) == all_checks().end()) {
                err << "check: unknown check '" << name << "'\n";
                return usage;
            }
            selected.push_back(name);
        }
    }

    Trace trace;
    try {
        std::ifstream in(opt.trace);
        if (!in) {
            throw Error("cannot open trace '" + opt.trace + "'");
        }
        trace = io::read_trace(in);
    } catch (const std::exception& e) {
        err << "check: " << e.what() << '\n';
        return usage;
    }

    Verdict verdict;
    json per_check = json::object();
    for (const auto& name : selected) {
        Verdict v;
        try {
            if (name == "p_t") {
                v = check_P_t(trace, trace.band);
            } else if (name == "p_e") {
                v = check_P_e(trace, trace.band);
            } else if (name == "inv_o") {
                v = check_inv_O(trace);
            } else if (name == "inv_r") {
                v = check_inv_R(trace);
            } else if (name == "guar") {
                v = check_guar_jobs(trace);
            } else if (name == "rely") {
                v = check_rely_scheduler(trace);
            } else {
                v = check_deadlines(trace);
            }
        } catch (const Error& e) {
            err << "check " << name << ": " << e.what() << '\n';
            return usage;
        }
        per_check[name] = v.pass();
        verdict.merge(v);
    }
    std::stable_sort(verdict.findings.begin(), verdict.findings.end(),
                     [](const Finding& a, const Finding& b) { return a.index < b.index; });

    if (opt.format == "json") {
        json report = io::verdict_to_json(verdict);
        report["checks"] = per_check;
        out << report.dump(2) << '\n';
    } else {
        print_findings(out, verdict);
        for (const auto& name : selected) {
            out << name << ": " << (per_check[name].get<bool>() ? "pass" : "FAIL") << '\n';
        }
        out << (verdict.pass() ? "all checks passed" : std::to_string(verdict.findings.size()) + " finding(s)")
            << '\n';
    }
    return verdict.pass() ? ok : violations;
}

struct AnalyzeOptions {
    std::string workload;
    std::string policy;
    std::string oracle = "scenarios";
    std::string format = "text";
};

inline int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err)
{
    WorkloadSpec w;
    PolicyId policy{};
    try {
        w = io::workload_from_json(read_json_file(opt.workload, "workload"));
        policy = parse_policy(opt.policy);
        require_desk_scale(w);
    } catch (const std::exception& e) {
        err << "analyze: " << e.what() << '\n';
        return usage;
    }

    const auto window = find_overloaded_window(w);
    json report{{"necessary_condition", !window.has_value()}};
    if (window) {
        json ids = json::array();
        for (const auto& id : window->jobs) {
            ids.push_back(id.str());
        }
        report["capacity_witness"] = json{
            {"start", window->start.count()}, {"end", window->end.count()}, {"demand", window->demand}, {"jobs", ids}};
    }

    bool feasible = false;
    if (opt.oracle == "exhaustive") {
        const ExhaustiveResult result = exhaustive_feasibility(w);
        feasible = result.feasible;
        report["optimistic_feasible"] = result.feasible;
        if (result.feasible) {
            json slots = json::array();
            for (const auto& slot : result.schedule) {
                slots.push_back(slot ? json(slot->str()) : json(nullptr));
            }
            report["schedule"] = slots;
        }
    } else {
        const FeasibilityVerdict verdict = scenario_analysis_mc(w, policy);
        feasible = verdict.mc_feasible;
        report.update(io::feasibility_to_json(verdict));
    }

    if (opt.format == "json") {
        out << report.dump(2) << '\n';
    } else {
        out << "necessary condition: " << (window ? "violated" : "holds") << '\n';
        if (window) {
            out << "  window [" << window->start.count() << ", " << window->end.count() << "] demands "
                << window->demand << " >" << " length " << (window->end - window->start) << " (jobs:";
            for (const auto& id : window->jobs) {
                out << ' ' << id.str();
            }
            out << ")\n";
        }
        if (opt.oracle == "exhaustive") {
            out << "exhaustive: " << (feasible ? "feasible" : "infeasible") << '\n';
            if (feasible) {
                out << "  schedule:";
                for (const auto& slot : report["schedule"]) {
                    out << ' ' << (slot.is_null() ? "-" : slot.get<std::string>());
                }
                out << '\n';
            }
        } else {
            out << "policy " << opt.policy << ": optimistic " << (report["optimistic_feasible"].get<bool>() ? "feasible" : "infeasible")
                << ", mixed-criticality " << (feasible ? "feasible" : "infeasible") << '\n';
            for (const auto& wit : report["witnesses"]) {
                out << "  witness " << wit["scenario"]["demand"].dump() << ": " << wit["miss"].get<std::string>()
                    << '\n';
            }
        }
    }
    return feasible ? ok : violations;
}

} // namespace detail

/// Entry point shared by the binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Mixed-criticality job scheduling simulator and trace checker", "mcsched"};
    app.require_subcommand(1);

    detail::SimOptions sim;
    auto* sim_cmd = app.add_subcommand("sim", "Simulate a workload under a policy and write a JSONL trace");
    sim_cmd->add_option("--workload", sim.workload, "Workload JSON")->required();
    sim_cmd->add_option("--policy", sim.policy, "edf | cr-edf | edf-ab | naive-rr")->required();
    auto* scenario_opt = sim_cmd->add_option("--scenario", sim.scenario, "Scenario JSON with fixed demands");
    sim_cmd->add_option("--demand-seed", sim.demand_seed, "Seed for random demands within criticality bounds")
        ->excludes(scenario_opt);
    sim_cmd->add_option("--trace", sim.trace, "Output trace path (JSON Lines)")->required();
    sim_cmd->add_option("--format", sim.format)->check(CLI::IsMember({"text", "json"}));

    detail::CheckOptions check;
    auto* check_cmd = app.add_subcommand("check", "Check invariants and rely/guarantee conditions on a trace");
    check_cmd->add_option("--trace", check.trace, "Trace JSONL")->required();
    check_cmd->add_option("--checks", check.checks, "Comma list of p_t,p_e,inv_o,inv_r,guar,rely,deadline");
    check_cmd->add_option("--format", check.format)->check(CLI::IsMember({"text", "json"}));

    detail::AnalyzeOptions analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Offline feasibility analysis of a small workload");
    analyze_cmd->add_option("--workload", analyze.workload, "Workload JSON")->required();
    analyze_cmd->add_option("--policy", analyze.policy, "edf | cr-edf | edf-ab | naive-rr")->required();
    analyze_cmd->add_option("--oracle", analyze.oracle)->check(CLI::IsMember({"exhaustive", "scenarios"}));
    analyze_cmd->add_option("--format", analyze.format)->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        return usage;
    }

    try {
        if (*sim_cmd) {
            return detail::cmd_sim(sim, out, err);
        }
        if (*check_cmd) {
            return detail::cmd_check(check, out, err);
        }
        return detail::cmd_analyze(analyze, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"mcsched"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace mcs::cli
