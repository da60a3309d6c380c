#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcs/jobs.hpp"
#include "mcs/time.hpp"

namespace mcs {

/// Scheduling mode of a run. A run only ever moves optimistic -> resilient.
enum class Mode { optimistic, resilient };

inline const char* to_string(Mode mode) { return mode == Mode::optimistic ? "optimistic" : "resilient"; }

inline Mode parse_mode(const std::string& text)
{
    if (text == "optimistic") {
        return Mode::optimistic;
    }
    if (text == "resilient") {
        return Mode::resilient;
    }
    throw Error("unknown mode '" + text + "'");
}

/// Which process took the step that produced a trace entry.
struct Actor {
    enum class Kind { time, scheduler, job, arrival };

    Kind kind = Kind::time;
    std::optional<JobId> job; // set iff kind == job

    static Actor time() { return {Kind::time, std::nullopt}; }
    static Actor scheduler() { return {Kind::scheduler, std::nullopt}; }
    static Actor arrival() { return {Kind::arrival, std::nullopt}; }
    static Actor of_job(JobId id) { return {Kind::job, std::move(id)}; }

    bool is_environment() const noexcept { return kind != Kind::scheduler; }

    std::string label() const
    {
        switch (kind) {
        case Kind::time: return "time";
        case Kind::scheduler: return "scheduler";
        case Kind::arrival: return "arrival";
        case Kind::job: return "job(" + job->str() + ")";
        }
        return "?";
    }

    static Actor parse(const std::string& text)
    {
        if (text == "time") {
            return time();
        }
        if (text == "scheduler") {
            return scheduler();
        }
        if (text == "arrival") {
            return arrival();
        }
        if (text.size() > 5 && text.starts_with("job(") && text.back() == ')') {
            return of_job(JobId(text.substr(4, text.size() - 5)));
        }
        throw Error("unknown actor '" + text + "'");
    }

    bool operator==(const Actor&) const = default;
};

/// One sampled point of the run: the state right after `actor`'s step.
struct TraceEntry {
    GroundTime alpha;
    State state;
    std::optional<Actor> actor;
    std::optional<JobEvent> event;
    Mode mode = Mode::optimistic;

    bool operator==(const TraceEntry&) const = default;
};

enum class OutcomeKind { met, missed, abandoned };

inline const char* to_string(OutcomeKind kind)
{
    switch (kind) {
    case OutcomeKind::met: return "completed-by-deadline";
    case OutcomeKind::missed: return "missed";
    case OutcomeKind::abandoned: return "abandoned";
    }
    return "?";
}

struct JobOutcome {
    OutcomeKind kind = OutcomeKind::met;
    /// Completion or abandonment instant; for misses, the first instant the
    /// clock was past the deadline with the job still active.
    GroundTime at;
    Mode mode = Mode::optimistic; // mode in force at `at`
    ClockValue deadline;
    Criticality crit = Criticality::lo();
    std::optional<ClockValue> finished;

    bool operator==(const JobOutcome&) const = default;
};

struct Trace {
    TimeBand band;
    std::vector<TraceEntry> entries;
    std::vector<JobEvent> events;
    std::map<JobId, JobOutcome> outcomes;
};

inline std::vector<JobEvent> collect_events(const std::vector<TraceEntry>& entries)
{
    std::vector<JobEvent> events;
    for (const auto& entry : entries) {
        if (entry.event) {
            events.push_back(*entry.event);
        }
    }
    return events;
}

/// Derives per-job outcomes from the entries alone. A completion at clock
/// value <= d meets the deadline; a job still active at the end of the trace
/// is a miss.
inline std::map<JobId, JobOutcome> compute_outcomes(const std::vector<TraceEntry>& entries)
{
    struct Tracking {
        JobInfo info;
        std::optional<std::size_t> first_late;
    };
    std::map<JobId, Tracking> open;
    std::map<JobId, JobOutcome> outcomes;

    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& entry = entries[i];
        if (entry.event && (entry.event->kind == EventKind::completion || entry.event->kind == EventKind::abandonment)) {
            const JobEvent& ev = *entry.event;
            auto it = open.find(ev.job);
            if (it != open.end()) {
                const Tracking& tr = it->second;
                JobOutcome out;
                out.deadline = tr.info.deadline;
                out.crit = tr.info.crit;
                if (ev.kind == EventKind::abandonment) {
                    out.kind = OutcomeKind::abandoned;
                    out.at = ev.at;
                    out.mode = entry.mode;
                } else {
                    out.finished = ev.clock;
                    if (ev.clock <= tr.info.deadline) {
                        out.kind = OutcomeKind::met;
                        out.at = ev.at;
                        out.mode = entry.mode;
                    } else {
                        out.kind = OutcomeKind::missed;
                        const auto& late = tr.first_late ? entries[*tr.first_late] : entry;
                        out.at = late.alpha;
                        out.mode = late.mode;
                    }
                }
                outcomes[ev.job] = out;
                open.erase(it);
            }
        }
        for (const auto& [id, job] : entry.state.active) {
            if (outcomes.contains(id)) {
                continue;
            }
            auto [it, inserted] = open.try_emplace(id, Tracking{job.info, std::nullopt});
            it->second.info = job.info;
            if (!it->second.first_late && entry.state.t > job.info.deadline) {
                it->second.first_late = i;
            }
        }
    }

    for (const auto& [id, tr] : open) {
        const auto& late = tr.first_late ? entries[*tr.first_late] : entries.back();
        outcomes[id] = JobOutcome{OutcomeKind::missed, late.alpha, late.mode, tr.info.deadline, tr.info.crit,
                                  std::nullopt};
    }
    return outcomes;
}

} // namespace mcs
