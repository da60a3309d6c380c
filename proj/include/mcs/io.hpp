#pragma once

// JSON forms of workloads, scenarios, traces (JSON Lines) and findings.

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "mcs/analysis.hpp"
#include "mcs/monitors.hpp"
#include "mcs/sim.hpp"
#include "mcs/trace.hpp"
#include "mcs/workload.hpp"

namespace mcs::io {

using json = nlohmann::json;

inline constexpr const char* trace_format = "mcs-trace/1";

/// 64-bit FNV-1a, hex encoded.
inline std::string digest(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline quanta_t get_quanta(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key)) {
        throw Error(where + ": missing field '" + key + "'");
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw Error(where + ": field '" + key + "' must be an integer");
    }
    return v.get<quanta_t>();
}

inline std::string get_string(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key) || !obj.at(key).is_string()) {
        throw Error(where + ": missing or non-string field '" + key + "'");
    }
    return obj.at(key).get<std::string>();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Workloads

inline json band_to_json(const TimeBand& band)
{
    return json{{"granularity", band.granularity}, {"precision", band.precision.count()}};
}

inline TimeBand band_from_json(const json& j)
{
    TimeBand band;
    if (j.contains("granularity")) {
        band.granularity = detail::get_string(j, "granularity", "band");
    }
    band.precision = Duration(detail::get_quanta(j, "precision", "band"));
    return band;
}

inline json workload_to_json(const WorkloadSpec& w)
{
    json drift{{"model", w.drift.model() == DriftSource::Model::none ? "none" : "bounded-random"}};
    if (w.drift.model() == DriftSource::Model::bounded_random) {
        drift["seed"] = w.drift.seed();
        drift["bound"] = w.drift.bound().count();
    }
    json jobs = json::array();
    for (const auto& job : w.jobs) {
        json entry{{"id", job.id.str()},
                   {"arrival", job.arrival.count()},
                   {"deadline_rel", job.relative_deadline.count()},
                   {"wcet", job.wcet.count()},
                   {"crit", job.crit.is_hi() ? "HI" : "LO"}};
        if (job.crit.is_hi()) {
            entry["wcet_extra"] = job.crit.extra().count();
        }
        jobs.push_back(std::move(entry));
    }
    return json{{"band", band_to_json(w.band)},
                {"horizon", w.horizon.count()},
                {"seed", w.seed},
                {"drift", drift},
                {"jobs", jobs}};
}

inline WorkloadSpec workload_from_json(const json& j)
{
    if (!j.is_object()) {
        throw Error("workload: expected a JSON object");
    }
    WorkloadSpec w;
    if (j.contains("band")) {
        w.band = band_from_json(j.at("band"));
    }
    w.horizon = Duration(detail::get_quanta(j, "horizon", "workload"));
    if (j.contains("seed")) {
        w.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("drift")) {
        const json& d = j.at("drift");
        const std::string model = detail::get_string(d, "model", "drift");
        if (model == "bounded-random") {
            const std::uint64_t seed = d.contains("seed") ? d.at("seed").get<std::uint64_t>() : w.seed;
            w.drift = DriftSource::bounded_random(seed, Duration(detail::get_quanta(d, "bound", "drift")));
        } else if (model != "none") {
            throw Error("drift: unknown model '" + model + "'");
        }
    }
    if (!j.contains("jobs") || !j.at("jobs").is_array()) {
        throw Error("workload: missing 'jobs' array");
    }
    for (const json& entry : j.at("jobs")) {
        JobSpec job;
        job.id = JobId(detail::get_string(entry, "id", "job"));
        const std::string where = "job '" + job.id.str() + "'";
        job.arrival = GroundTime(detail::get_quanta(entry, "arrival", where));
        job.relative_deadline = Duration(detail::get_quanta(entry, "deadline_rel", where));
        job.wcet = Duration(detail::get_quanta(entry, "wcet", where));
        const std::string crit = detail::get_string(entry, "crit", where);
        if (crit == "HI") {
            job.crit = Criticality::hi(
                Duration(entry.contains("wcet_extra") ? detail::get_quanta(entry, "wcet_extra", where) : 0));
        } else if (crit == "LO") {
            if (entry.contains("wcet_extra")) {
                throw Error(where + ": wcet_extra is not allowed on LO jobs");
            }
        } else {
            throw Error(where + ": crit must be \"LO\" or \"HI\"");
        }
        w.jobs.push_back(std::move(job));
    }
    validate(w);
    return w;
}

inline json scenario_to_json(const Scenario& s)
{
    json demand = json::object();
    for (const auto& [id, d] : s.demand) {
        demand[id.str()] = d.count();
    }
    return json{{"demand", demand}};
}

inline Scenario scenario_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("demand") || !j.at("demand").is_object()) {
        throw Error("scenario: expected {\"demand\": {id: quanta, ...}}");
    }
    Scenario s;
    for (const auto& [id, d] : j.at("demand").items()) {
        if (!d.is_number_integer()) {
            throw Error("scenario: demand for '" + id + "' must be an integer");
        }
        s.demand[JobId(id)] = Duration(d.get<quanta_t>());
    }
    return s;
}

// ---------------------------------------------------------------------------
// Traces

inline json event_to_json(const JobEvent& ev)
{
    return json{{"kind", to_string(ev.kind)}, {"job", ev.job.str()}, {"at", ev.at.count()}, {"clock", ev.clock.count()}};
}

inline json entry_to_json(const TraceEntry& entry)
{
    json active = json::object();
    for (const auto& [id, job] : entry.state.active) {
        json j{{"e", job.executed.count()},
               {"run", job.run},
               {"d", job.info.deadline.count()},
               {"C", job.info.wcet.count()},
               {"crit", job.info.crit.is_hi() ? "HI" : "LO"}};
        if (job.info.crit.is_hi()) {
            j["X"] = job.info.crit.extra().count();
        }
        active[id.str()] = std::move(j);
    }
    return json{{"alpha", entry.alpha.count()},
                {"t", entry.state.t.count()},
                {"actor", entry.actor ? json(entry.actor->label()) : json(nullptr)},
                {"mode", to_string(entry.mode)},
                {"event", entry.event ? event_to_json(*entry.event) : json(nullptr)},
                {"active", std::move(active)}};
}

inline TraceEntry entry_from_json(const json& j, std::size_t line)
{
    const std::string where = "trace line " + std::to_string(line);
    if (!j.is_object()) {
        throw Error(where + ": expected an object");
    }
    TraceEntry entry;
    entry.alpha = GroundTime(detail::get_quanta(j, "alpha", where));
    entry.state.t = ClockValue(detail::get_quanta(j, "t", where));
    if (j.contains("actor") && !j.at("actor").is_null()) {
        entry.actor = Actor::parse(detail::get_string(j, "actor", where));
    }
    entry.mode = parse_mode(detail::get_string(j, "mode", where));
    if (j.contains("event") && !j.at("event").is_null()) {
        const json& ev = j.at("event");
        entry.event = JobEvent{parse_event_kind(detail::get_string(ev, "kind", where)),
                               JobId(detail::get_string(ev, "job", where)),
                               GroundTime(detail::get_quanta(ev, "at", where)),
                               ClockValue(detail::get_quanta(ev, "clock", where))};
    }
    if (!j.contains("active") || !j.at("active").is_object()) {
        throw Error(where + ": missing 'active' map");
    }
    for (const auto& [id, jj] : j.at("active").items()) {
        const std::string crit = detail::get_string(jj, "crit", where);
        Criticality c = Criticality::lo();
        if (crit == "HI") {
            c = Criticality::hi(Duration(detail::get_quanta(jj, "X", where)));
        } else if (crit != "LO") {
            throw Error(where + ": bad crit '" + crit + "'");
        }
        if (!jj.contains("run") || !jj.at("run").is_boolean()) {
            throw Error(where + ": job '" + id + "' lacks boolean 'run'");
        }
        entry.state.active.emplace(
            JobId(id), Job{Duration(detail::get_quanta(jj, "e", where)), jj.at("run").get<bool>(),
                           JobInfo{ClockValue(detail::get_quanta(jj, "d", where)),
                                   Duration(detail::get_quanta(jj, "C", where)), c}});
    }
    return entry;
}

/// Header line followed by one line per entry. Output is a pure function of
/// the trace and header fields.
inline void write_trace(std::ostream& out, const Trace& trace, const json& header_fields = json::object())
{
    json header = header_fields;
    header["format"] = trace_format;
    header["band"] = band_to_json(trace.band);
    out << header.dump() << '\n';
    for (const auto& entry : trace.entries) {
        out << entry_to_json(entry).dump() << '\n';
    }
}

inline Trace read_trace(std::istream& in)
{
    Trace trace;
    std::string line;
    std::size_t number = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error("trace line " + std::to_string(number) + ": " + e.what());
        }
        if (!have_header) {
            if (!j.is_object() || !j.contains("band")) {
                throw Error("trace: first line must be a header with 'band'");
            }
            trace.band = band_from_json(j.at("band"));
            have_header = true;
            continue;
        }
        try {
            trace.entries.push_back(entry_from_json(j, number));
        } catch (const json::exception& e) {
            throw Error("trace line " + std::to_string(number) + ": " + e.what());
        }
    }
    if (!have_header) {
        throw Error("trace: empty input");
    }
    if (trace.entries.empty()) {
        throw Error("trace: no entries");
    }
    for (std::size_t i = 1; i < trace.entries.size(); ++i) {
        if (trace.entries[i].alpha < trace.entries[i - 1].alpha) {
            throw Error("trace: alpha decreases at entry " + std::to_string(i));
        }
    }
    trace.events = collect_events(trace.entries);
    trace.outcomes = compute_outcomes(trace.entries);
    return trace;
}

// ---------------------------------------------------------------------------
// Reports

inline json finding_to_json(const Finding& f)
{
    return json{{"predicate", f.predicate}, {"at", f.at.count()}, {"index", f.index}, {"detail", f.detail}};
}

inline json verdict_to_json(const Verdict& v)
{
    json findings = json::array();
    for (const auto& f : v.findings) {
        findings.push_back(finding_to_json(f));
    }
    return json{{"pass", v.pass()}, {"findings", findings}};
}

inline json feasibility_to_json(const FeasibilityVerdict& v)
{
    json witnesses = json::array();
    for (const auto& w : v.witnesses) {
        witnesses.push_back(json{{"scenario", scenario_to_json(w.scenario)}, {"miss", w.description}});
    }
    return json{{"optimistic_feasible", v.optimistic_feasible},
                {"mc_feasible", v.mc_feasible},
                {"witnesses", witnesses}};
}

} // namespace mcs::io
