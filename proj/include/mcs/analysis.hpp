#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mcs/schedulers.hpp"
#include "mcs/sim.hpp"
#include "mcs/workload.hpp"

namespace mcs {

/// Largest instance the exact oracles accept.
inline constexpr std::size_t desk_scale_max_jobs = 4;
inline constexpr quanta_t desk_scale_max_horizon = 64;

class DeskScaleError : public Error {
public:
    using Error::Error;
};

inline void require_desk_scale(const WorkloadSpec& w)
{
    if (w.jobs.size() > desk_scale_max_jobs || w.horizon.count() > desk_scale_max_horizon) {
        throw DeskScaleError("instance has " + std::to_string(w.jobs.size()) + " jobs and horizon " +
                             std::to_string(w.horizon.count()) + "; exact analysis is limited to " +
                             std::to_string(desk_scale_max_jobs) + " jobs and horizon " +
                             std::to_string(desk_scale_max_horizon) + ". Use `sim` + `check` for larger workloads.");
    }
}

/// A window [start, end] whose contained jobs demand more than its length.
struct CapacityWindow {
    GroundTime start;
    GroundTime end;
    quanta_t demand = 0;
    std::vector<JobId> jobs;
};

/// The first overloaded window (by start, then end), if any. A window holds
/// every job arriving at or after `start` with absolute deadline at or
/// before `end`.
inline std::optional<CapacityWindow> find_overloaded_window(const WorkloadSpec& w)
{
    std::set<GroundTime> starts;
    std::set<GroundTime> ends;
    for (const auto& job : w.jobs) {
        starts.insert(job.arrival);
        ends.insert(job.arrival + job.relative_deadline);
    }
    for (GroundTime a : starts) {
        for (GroundTime b : ends) {
            if (b <= a) {
                continue;
            }
            CapacityWindow window{a, b, 0, {}};
            for (const auto& job : w.jobs) {
                if (job.arrival >= a && job.arrival + job.relative_deadline <= b) {
                    window.demand += job.wcet.count();
                    window.jobs.push_back(job.id);
                }
            }
            if (window.demand > b - a) {
                return window;
            }
        }
    }
    return std::nullopt;
}

/// Capacity condition necessary for feasibility: no window is overloaded.
inline bool necessary_condition(const WorkloadSpec& w) { return !find_overloaded_window(w).has_value(); }

struct ExhaustiveResult {
    bool feasible = false;
    /// One slot per quantum from 0 until the last completion; nullopt = idle.
    std::vector<std::optional<JobId>> schedule;
};

/// Exact single-processor preemptive feasibility with every job demanding C,
/// by depth-first search over which ready job runs in each quantum. Branches
/// where some job can no longer finish by its deadline even running alone
/// are cut, and visited dead states are memoized. The processor idles only
/// when nothing is ready.
inline ExhaustiveResult exhaustive_feasibility(const WorkloadSpec& w)
{
    validate(w);
    require_desk_scale(w);

    const std::size_t n = w.jobs.size();
    std::vector<quanta_t> remaining(n);
    for (std::size_t j = 0; j < n; ++j) {
        remaining[j] = w.jobs[j].wcet.count();
    }

    std::set<std::pair<quanta_t, std::vector<quanta_t>>> dead;
    std::vector<std::optional<JobId>> path;

    auto search = [&](auto&& self, quanta_t t) -> bool {
        bool done = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (remaining[j] == 0) {
                continue;
            }
            done = false;
            const quanta_t deadline = (w.jobs[j].arrival + w.jobs[j].relative_deadline).count();
            const quanta_t earliest_start = std::max(t, w.jobs[j].arrival.count());
            if (earliest_start + remaining[j] > deadline) {
                return false;
            }
        }
        if (done) {
            return true;
        }
        if (dead.contains({t, remaining})) {
            return false;
        }

        bool any_ready = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (remaining[j] == 0 || w.jobs[j].arrival.count() > t) {
                continue;
            }
            any_ready = true;
            --remaining[j];
            path.push_back(w.jobs[j].id);
            if (self(self, t + 1)) {
                return true;
            }
            path.pop_back();
            ++remaining[j];
        }
        if (!any_ready) {
            path.push_back(std::nullopt);
            if (self(self, t + 1)) {
                return true;
            }
            path.pop_back();
        }
        dead.insert({t, remaining});
        return false;
    };

    ExhaustiveResult result;
    result.feasible = search(search, 0);
    if (result.feasible) {
        result.schedule = path;
    }
    return result;
}

struct Witness {
    Scenario scenario;
    std::string encoding;
    std::string description;
};

struct FeasibilityVerdict {
    /// No deadline miss at all when every job demands exactly C.
    bool optimistic_feasible = true;
    /// optimistic_feasible, and no hi-crit miss in any boundary scenario.
    bool mc_feasible = true;
    std::vector<Witness> witnesses;
};

inline std::string encode(const Scenario& scenario)
{
    std::string out;
    for (const auto& [id, demand] : scenario.demand) {
        if (!out.empty()) {
            out += ",";
        }
        out += id.str() + "=" + std::to_string(demand.count());
    }
    return out;
}

/// Boundary scenarios: each hi-crit job at C or C + X, each lo-crit job at
/// C. The first scenario is the all-C one.
inline std::vector<Scenario> boundary_scenarios(const WorkloadSpec& w)
{
    std::vector<const JobSpec*> variable;
    Scenario base;
    for (const auto& job : w.jobs) {
        base.demand[job.id] = job.wcet;
        if (job.crit.is_hi() && job.crit.extra().count() > 0) {
            variable.push_back(&job);
        }
    }
    std::vector<Scenario> lattice;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << variable.size()); ++mask) {
        Scenario s = base;
        for (std::size_t k = 0; k < variable.size(); ++k) {
            if (mask & (std::uint64_t{1} << k)) {
                s.demand[variable[k]->id] = variable[k]->max_demand();
            }
        }
        lattice.push_back(std::move(s));
    }
    return lattice;
}

/// Simulates `policy` with a perfect clock across every boundary scenario.
inline FeasibilityVerdict scenario_analysis_mc(const WorkloadSpec& w, PolicyId policy)
{
    validate(w);
    require_desk_scale(w);

    WorkloadSpec exact = w;
    exact.band.precision = Duration{};
    exact.drift = DriftSource::none();

    FeasibilityVerdict verdict;
    bool hi_safe = true;
    const auto lattice = boundary_scenarios(exact);
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        const bool all_wcet = k == 0;
        const Trace trace = run(RunConfig{exact, policy, lattice[k], std::nullopt});
        std::string misses;
        for (const auto& [id, out] : trace.outcomes) {
            if (out.kind != OutcomeKind::missed || (!all_wcet && !out.crit.is_hi())) {
                continue;
            }
            if (!misses.empty()) {
                misses += "; ";
            }
            misses += id.str() + (out.crit.is_hi() ? " (hi)" : " (lo)") + " missed d=" +
                      std::to_string(out.deadline.count());
            misses += out.finished ? ", completed at t=" + std::to_string(out.finished->count()) : ", never completed";
            if (all_wcet) {
                verdict.optimistic_feasible = false;
            }
            if (out.crit.is_hi()) {
                hi_safe = false;
            }
        }
        if (!misses.empty()) {
            verdict.witnesses.push_back(Witness{lattice[k], encode(lattice[k]), misses});
        }
    }
    verdict.mc_feasible = verdict.optimistic_feasible && hi_safe;
    std::sort(verdict.witnesses.begin(), verdict.witnesses.end(),
              [](const Witness& a, const Witness& b) { return a.encoding < b.encoding; });
    return verdict;
}

} // namespace mcs
