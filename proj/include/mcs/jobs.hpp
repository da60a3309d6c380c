#pragma once

#include <map>
#include <string>
#include <utility>

#include "mcs/time.hpp"

namespace mcs {

class JobId {
public:
    JobId() = default;
    explicit JobId(std::string name) : name_(std::move(name))
    {
        if (name_.empty()) {
            throw Error("job id must be non-empty");
        }
    }

    const std::string& str() const noexcept { return name_; }

    auto operator<=>(const JobId&) const = default;

private:
    std::string name_;
};

/// Lo, or Hi carrying the extra execution allowance X usable on overrun.
class Criticality {
public:
    enum class Level { lo, hi };

    static Criticality lo() { return Criticality(Level::lo, Duration{}); }
    static Criticality hi(Duration extra) { return Criticality(Level::hi, extra); }

    Level level() const noexcept { return level_; }
    bool is_hi() const noexcept { return level_ == Level::hi; }
    /// X for Hi jobs; zero for Lo.
    Duration extra() const noexcept { return extra_; }

    bool operator==(const Criticality&) const = default;

private:
    Criticality(Level level, Duration extra) : level_(level), extra_(extra) {}

    Level level_ = Level::lo;
    Duration extra_{};
};

/// Static per-job data, fixed at arrival.
struct JobInfo {
    ClockValue deadline;
    Duration wcet;
    Criticality crit = Criticality::lo();

    bool operator==(const JobInfo&) const = default;
};

/// Dynamic per-job data. `executed` is advanced only by the passage of time.
struct Job {
    Duration executed;
    bool run = false;
    JobInfo info;

    bool operator==(const Job&) const = default;
};

using ActiveMap = std::map<JobId, Job>;

/// Machine state: the clock reading plus every job that has arrived and has
/// neither completed nor been abandoned.
struct State {
    ClockValue t;
    ActiveMap active;

    bool operator==(const State&) const = default;
};

enum class EventKind { arrival, completion, abandonment, run_set, run_clear };

struct JobEvent {
    EventKind kind = EventKind::arrival;
    JobId job;
    GroundTime at;
    ClockValue clock;

    bool operator==(const JobEvent&) const = default;
};

inline const char* to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::arrival: return "arrival";
    case EventKind::completion: return "completion";
    case EventKind::abandonment: return "abandonment";
    case EventKind::run_set: return "run-set";
    case EventKind::run_clear: return "run-clear";
    }
    return "?";
}

inline EventKind parse_event_kind(const std::string& text)
{
    for (auto kind : {EventKind::arrival, EventKind::completion, EventKind::abandonment, EventKind::run_set,
                      EventKind::run_clear}) {
        if (text == to_string(kind)) {
            return kind;
        }
    }
    throw Error("unknown event kind '" + text + "'");
}

namespace detail {

inline Job& find_job(State& state, const JobId& id, const char* op)
{
    auto it = state.active.find(id);
    if (it == state.active.end()) {
        throw Error(std::string(op) + ": unknown job '" + id.str() + "'");
    }
    return it->second;
}

} // namespace detail

/// A job enters `active` not running, with e = 0 and absolute deadline t + D.
inline State arrive(State state, const JobId& id, Duration relative_deadline, Duration wcet, Criticality crit)
{
    if (state.active.contains(id)) {
        throw Error("arrive: duplicate job id '" + id.str() + "'");
    }
    state.active.emplace(id, Job{Duration{}, false, JobInfo{state.t + relative_deadline, wcet, crit}});
    return state;
}

inline State set_run(State state, const JobId& id, bool flag)
{
    detail::find_job(state, id, "set_run").run = flag;
    return state;
}

inline State complete(State state, const JobId& id)
{
    detail::find_job(state, id, "complete");
    state.active.erase(id);
    return state;
}

/// Removes a lo-crit job from service. Abandoning a hi-crit job is a policy bug.
inline State abandon(State state, const JobId& id)
{
    const Job& job = detail::find_job(state, id, "abandon");
    if (job.info.crit.is_hi()) {
        throw Error("abandon: job '" + id.str() + "' is hi-crit");
    }
    state.active.erase(id);
    return state;
}

} // namespace mcs
