#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mcs/jobs.hpp"
#include "mcs/time.hpp"
#include "mcs/timebase.hpp"

namespace mcs {

struct JobSpec {
    JobId id;
    GroundTime arrival;
    Duration relative_deadline;
    Duration wcet;
    Criticality crit = Criticality::lo();

    /// Largest demand the job may legitimately realize: C, or C + X for hi-crit.
    Duration max_demand() const { return wcet + crit.extra(); }
};

struct WorkloadSpec {
    TimeBand band;
    Duration horizon;
    std::uint64_t seed = 0;
    DriftSource drift;
    std::vector<JobSpec> jobs;
};

/// Realized execution demand per job. Jobs not listed demand exactly C.
struct Scenario {
    std::map<JobId, Duration> demand;

    bool operator==(const Scenario&) const = default;
};

/// Throws Error describing the first violated workload invariant.
inline void validate(const WorkloadSpec& w)
{
    if (w.drift.bound() > w.band.precision) {
        throw Error("workload: drift bound " + std::to_string(w.drift.bound().count()) + " exceeds band precision " +
                    std::to_string(w.band.precision.count()));
    }
    std::set<JobId> seen;
    for (const auto& job : w.jobs) {
        if (!seen.insert(job.id).second) {
            throw Error("workload: duplicate job id '" + job.id.str() + "'");
        }
        if (job.wcet.count() < 1) {
            throw Error("workload: job '" + job.id.str() + "' has wcet < 1");
        }
        if ((job.arrival + job.relative_deadline).count() > w.horizon.count()) {
            throw Error("workload: job '" + job.id.str() + "' has arrival + deadline_rel beyond the horizon");
        }
    }
}

/// Throws Error unless every demand lies in [1, C] (lo) or [1, C + X] (hi)
/// and names a job of the workload.
inline void validate(const Scenario& scenario, const WorkloadSpec& w)
{
    for (const auto& [id, demand] : scenario.demand) {
        auto it = std::find_if(w.jobs.begin(), w.jobs.end(), [&](const JobSpec& j) { return j.id == id; });
        if (it == w.jobs.end()) {
            throw Error("scenario: unknown job '" + id.str() + "'");
        }
        if (demand.count() < 1 || demand > it->max_demand()) {
            throw Error("scenario: demand " + std::to_string(demand.count()) + " for '" + id.str() +
                        "' outside [1, " + std::to_string(it->max_demand().count()) + "]");
        }
    }
}

inline Duration demand_of(const Scenario& scenario, const JobSpec& job)
{
    auto it = scenario.demand.find(job.id);
    return it == scenario.demand.end() ? job.wcet : it->second;
}

} // namespace mcs
