#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "mcs/jobs.hpp"
#include "mcs/schedulers.hpp"
#include "mcs/timebase.hpp"
#include "mcs/trace.hpp"
#include "mcs/workload.hpp"

namespace mcs {

struct RunConfig {
    WorkloadSpec workload;
    PolicyId policy = PolicyId::edf;
    /// Fixed demands. Takes precedence over demand_seed; with neither set
    /// every job demands exactly C.
    std::optional<Scenario> scenario;
    std::optional<std::uint64_t> demand_seed;
};

/// Demands a run will realize, drawn uniformly from [1, C] (lo) or
/// [1, C + X] (hi) when seeded.
inline Scenario realize_demands(const RunConfig& config)
{
    Scenario realized;
    if (config.scenario) {
        validate(*config.scenario, config.workload);
        for (const auto& job : config.workload.jobs) {
            realized.demand[job.id] = demand_of(*config.scenario, job);
        }
        return realized;
    }
    std::optional<std::mt19937_64> rng;
    if (config.demand_seed) {
        rng.emplace(*config.demand_seed);
    }
    for (const auto& job : config.workload.jobs) {
        if (rng) {
            std::uniform_int_distribution<quanta_t> pick(1, job.max_demand().count());
            realized.demand[job.id] = Duration(pick(*rng));
        } else {
            realized.demand[job.id] = job.wcet;
        }
    }
    return realized;
}

/// Simulates one run. Each quantum: arrivals, one scheduling decision, one
/// quantum of time, then completion of every job whose execution reached its
/// demand. An entry is recorded after every individual step. The run covers
/// the horizon and continues past it only while some unfinished job can
/// still meet its deadline.
inline Trace run(const RunConfig& config)
{
    const WorkloadSpec& w = config.workload;
    validate(w);
    const Scenario demands = realize_demands(config);

    std::vector<const JobSpec*> pending;
    for (const auto& job : w.jobs) {
        pending.push_back(&job);
    }
    std::stable_sort(pending.begin(), pending.end(), [](const JobSpec* a, const JobSpec* b) {
        return a->arrival != b->arrival ? a->arrival < b->arrival : a->id < b->id;
    });
    auto next_arrival = pending.begin();

    quanta_t total_demand = 0;
    for (const auto& [id, d] : demands.demand) {
        total_demand += d.count();
    }
    const quanta_t step_cap = w.horizon.count() + total_demand + w.band.precision.count() + 2;

    Trace trace;
    trace.band = w.band;
    World world{GroundTime{}, w.drift, State{}};
    Mode mode = Mode::optimistic;
    PolicyContext ctx;

    auto record = [&](Actor actor, std::optional<JobEvent> event) {
        if (event) {
            trace.events.push_back(*event);
        }
        trace.entries.push_back(TraceEntry{world.alpha, world.state, std::move(actor), std::move(event), mode});
    };
    auto event = [&](EventKind kind, const JobId& id) {
        return JobEvent{kind, id, world.alpha, world.state.t};
    };

    for (;;) {
        while (next_arrival != pending.end() && (*next_arrival)->arrival == world.alpha) {
            const JobSpec& spec = **next_arrival;
            world.state = arrive(world.state, spec.id, spec.relative_deadline, spec.wcet, spec.crit);
            record(Actor::arrival(), event(EventKind::arrival, spec.id));
            ++next_arrival;
        }

        const bool past_horizon = world.alpha.count() >= w.horizon.count() && next_arrival == pending.end();
        const bool none_salvageable = std::all_of(world.state.active.begin(), world.state.active.end(),
                                                  [&](const auto& kv) { return world.state.t > kv.second.info.deadline; });
        if (past_horizon && none_salvageable) {
            break;
        }
        if (world.alpha.count() > step_cap) {
            throw std::logic_error("sim: run exceeded its step bound; policy made no progress");
        }

        const Decision decision = decide(config.policy, world.state, mode, ctx);
        if (mode == Mode::resilient && decision.new_mode == Mode::optimistic) {
            throw std::logic_error("sim: policy attempted resilient -> optimistic");
        }
        mode = decision.new_mode;
        bool stepped = false;
        for (const auto& id : decision.abandon_set) {
            world.state = abandon(world.state, id);
            record(Actor::scheduler(), event(EventKind::abandonment, id));
            stepped = true;
        }
        for (const auto& id : decision.stop_set) {
            world.state = set_run(world.state, id, false);
            record(Actor::scheduler(), event(EventKind::run_clear, id));
            stepped = true;
        }
        for (const auto& id : decision.run_set) {
            world.state = set_run(world.state, id, true);
            record(Actor::scheduler(), event(EventKind::run_set, id));
            stepped = true;
        }
        if (!stepped) {
            record(Actor::scheduler(), std::nullopt);
        }
        const auto running = std::count_if(world.state.active.begin(), world.state.active.end(),
                                           [](const auto& kv) { return kv.second.run; });
        if (running > 1) {
            throw std::logic_error("sim: more than one job running on a single processor");
        }

        world = advance_world(std::move(world), Duration(1), w.band);
        record(Actor::time(), std::nullopt);

        std::vector<JobId> finished;
        for (const auto& [id, job] : world.state.active) {
            if (job.executed >= demands.demand.at(id)) {
                finished.push_back(id);
            }
        }
        for (const auto& id : finished) {
            world.state = complete(world.state, id);
            record(Actor::of_job(id), event(EventKind::completion, id));
        }
    }

    trace.outcomes = compute_outcomes(trace.entries);
    return trace;
}

/// Parameter ranges for generated workloads. Every C lies in
/// [wcet_min, wcet_max] and every D in [C, deadline_max].
struct GeneratorBounds {
    std::size_t min_jobs = 1;
    std::size_t max_jobs = 3;
    quanta_t wcet_min = 1;
    quanta_t wcet_max = 6;
    quanta_t deadline_max = 12;
    quanta_t arrival_max = 12;
    quanta_t extra_max = 0;
    /// Percentage of jobs that are hi-crit.
    int hi_percent = 0;
    quanta_t precision = 0;
};

inline void validate(const GeneratorBounds& b)
{
    if (b.min_jobs > b.max_jobs) {
        throw Error("generator: min_jobs > max_jobs");
    }
    if (b.wcet_min < 1 || b.wcet_max < b.wcet_min) {
        throw Error("generator: wcet range must satisfy 1 <= wcet_min <= wcet_max");
    }
    if (b.deadline_max < b.wcet_max) {
        throw Error("generator: deadline_max < wcet_max would permit D < C");
    }
    if (b.arrival_max < 0 || b.extra_max < 0 || b.precision < 0 || b.hi_percent < 0 || b.hi_percent > 100) {
        throw Error("generator: negative range or hi_percent outside [0, 100]");
    }
}

/// Deterministic corpus of valid workloads for a given seed.
inline std::vector<WorkloadSpec> generate_workloads(std::uint64_t seed, std::size_t count, const GeneratorBounds& b)
{
    validate(b);
    std::mt19937_64 rng(seed);
    auto draw = [&](quanta_t lo, quanta_t hi) { return std::uniform_int_distribution<quanta_t>(lo, hi)(rng); };

    std::vector<WorkloadSpec> corpus;
    corpus.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        WorkloadSpec w;
        w.seed = rng();
        w.band = TimeBand{"1q", Duration(b.precision)};
        w.drift = b.precision > 0 ? DriftSource::bounded_random(w.seed, Duration(b.precision)) : DriftSource::none();
        const auto jobs = static_cast<std::size_t>(
            draw(static_cast<quanta_t>(b.min_jobs), static_cast<quanta_t>(b.max_jobs)));
        quanta_t horizon = 1;
        for (std::size_t j = 0; j < jobs; ++j) {
            JobSpec spec;
            spec.id = JobId("j" + std::to_string(j));
            spec.arrival = GroundTime(draw(0, b.arrival_max));
            const quanta_t wcet = draw(b.wcet_min, b.wcet_max);
            spec.wcet = Duration(wcet);
            spec.relative_deadline = Duration(draw(wcet, b.deadline_max));
            spec.crit = draw(1, 100) <= b.hi_percent ? Criticality::hi(Duration(draw(0, b.extra_max)))
                                                      : Criticality::lo();
            horizon = std::max(horizon, (spec.arrival + spec.relative_deadline).count());
            w.jobs.push_back(std::move(spec));
        }
        w.horizon = Duration(horizon);
        corpus.push_back(std::move(w));
    }
    return corpus;
}

} // namespace mcs
