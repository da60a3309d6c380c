#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcs/jobs.hpp"
#include "mcs/time.hpp"
#include "mcs/trace.hpp"

namespace mcs {

/// A violation of a named predicate at a concrete trace entry.
struct Finding {
    std::string predicate;
    GroundTime at;
    std::size_t index = 0;
    std::string detail;

    bool operator==(const Finding&) const = default;
};

struct Verdict {
    std::vector<Finding> findings;

    bool pass() const noexcept { return findings.empty(); }

    void merge(const Verdict& other) { findings.insert(findings.end(), other.findings.begin(), other.findings.end()); }

    bool operator==(const Verdict&) const = default;
};

// ---------------------------------------------------------------------------
// State invariants

/// Remaining budget C - e against remaining time d - t, in signed arithmetic.
inline quanta_t optimistic_slack(const Job& job, ClockValue t)
{
    return (job.info.deadline - t) - (job.info.wcet.count() - job.executed.count());
}

/// Same as optimistic_slack, but assuming the hi-crit job uses its extra
/// allowance X as well.
inline quanta_t resilient_slack(const Job& job, ClockValue t)
{
    return optimistic_slack(job, t) - job.info.crit.extra().count();
}

/// Every active job still has room to finish by its deadline: C - e <= d - t.
inline bool inv_state_O(const State& state)
{
    for (const auto& [id, job] : state.active) {
        if (optimistic_slack(job, state.t) < 0) {
            return false;
        }
    }
    return true;
}

/// Every hi-crit job has room to finish using its extra allowance:
/// C + X - e <= d - t. Lo-crit jobs are ignored.
inline bool inv_state_R(const State& state)
{
    for (const auto& [id, job] : state.active) {
        if (job.info.crit.is_hi() && resilient_slack(job, state.t) < 0) {
            return false;
        }
    }
    return true;
}

/// Whether switching to resilient mode at this state is safe, i.e. the
/// resilient invariant already holds. When every hi-crit allowance is zero
/// the optimistic invariant must imply the resilient one; a state where it
/// does not is an evaluator defect.
inline bool check_mode_transition(const State& state)
{
    const bool resilient_ok = inv_state_R(state);
    bool all_zero_extra = true;
    for (const auto& [id, job] : state.active) {
        if (job.info.crit.is_hi() && job.info.crit.extra().count() != 0) {
            all_zero_extra = false;
        }
    }
    if (all_zero_extra && inv_state_O(state) && !resilient_ok) {
        throw std::logic_error("inv-State_O holds with all X = 0 but inv-State_R does not");
    }
    return resilient_ok;
}

// ---------------------------------------------------------------------------
// Trace checks

namespace detail {

inline std::string describe(const JobId& id, const Job& job, ClockValue t)
{
    std::ostringstream out;
    out << id.str() << ": e=" << job.executed.count() << " C=" << job.info.wcet.count();
    if (job.info.crit.is_hi()) {
        out << " X=" << job.info.crit.extra().count();
    }
    out << " d=" << job.info.deadline.count() << " t=" << t.count();
    return out.str();
}

inline void require_nonempty(const Trace& trace, const char* check)
{
    if (trace.entries.empty()) {
        throw Error(std::string(check) + ": empty trace");
    }
}

inline Finding finding_at(const Trace& trace, std::size_t index, std::string predicate, std::string detail)
{
    return Finding{std::move(predicate), trace.entries[index].alpha, index, std::move(detail)};
}

} // namespace detail

/// The clock reads within the band precision of real time on every entry.
inline Verdict check_P_t(const Trace& trace, const TimeBand& band)
{
    detail::require_nonempty(trace, "check_P_t");
    Verdict verdict;
    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        const auto& entry = trace.entries[i];
        if (!rho_eq(entry.state.t.count(), entry.alpha.count(), band.precision)) {
            std::ostringstream out;
            out << "|t - alpha| = |" << entry.state.t.count() << " - " << entry.alpha.count() << "| > rho = "
                << band.precision.count();
            verdict.findings.push_back(detail::finding_at(trace, i, "P_t", out.str()));
        }
    }
    return verdict;
}

/// Execution accounting over every maximal interval in which a job's run flag
/// is constant. Running: the change in e equals the change in alpha exactly,
/// and the change in clock reading to within 2 rho. Idle: e does not change.
inline Verdict check_P_e(const Trace& trace, const TimeBand& band)
{
    detail::require_nonempty(trace, "check_P_e");
    Verdict verdict;

    struct Segment {
        std::size_t first;
        std::size_t last;
        bool run;
    };
    std::map<JobId, Segment> open;

    auto close = [&](const JobId& id, const Segment& seg) {
        const auto& a = trace.entries[seg.first];
        const auto& b = trace.entries[seg.last];
        const quanta_t de = b.state.active.at(id).executed.count() - a.state.active.at(id).executed.count();
        const quanta_t dalpha = b.alpha - a.alpha;
        const quanta_t dt = b.state.t - a.state.t;
        std::ostringstream where;
        where << id.str() << " over alpha [" << a.alpha.count() << ", " << b.alpha.count() << "]: ";
        if (seg.run) {
            if (de != dalpha) {
                verdict.findings.push_back(detail::finding_at(
                    trace, seg.last, "P_e",
                    where.str() + "running, delta e = " + std::to_string(de) + " != delta alpha = " +
                        std::to_string(dalpha)));
            }
            if (!rho_eq(de, dt, Duration(2 * band.precision.count()))) {
                verdict.findings.push_back(detail::finding_at(
                    trace, seg.last, "P_e",
                    where.str() + "running, delta e = " + std::to_string(de) + " vs clock delta " +
                        std::to_string(dt) + " exceeds 2*rho"));
            }
        } else if (de != 0) {
            verdict.findings.push_back(detail::finding_at(
                trace, seg.last, "P_e", where.str() + "idle, but e changed by " + std::to_string(de)));
        }
    };

    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        const auto& active = trace.entries[i].state.active;
        for (auto it = open.begin(); it != open.end();) {
            auto job = active.find(it->first);
            if (job == active.end() || job->second.run != it->second.run) {
                close(it->first, it->second);
                it = open.erase(it);
            } else {
                it->second.last = i;
                ++it;
            }
        }
        for (const auto& [id, job] : active) {
            open.try_emplace(id, Segment{i, i, job.run});
        }
    }
    for (const auto& [id, seg] : open) {
        close(id, seg);
    }

    std::stable_sort(verdict.findings.begin(), verdict.findings.end(),
                     [](const Finding& x, const Finding& y) { return x.index < y.index; });
    return verdict;
}

/// Job `id` stays within its promised budget: C in optimistic mode, C + X
/// for hi-crit jobs in resilient mode (lo-crit jobs promise nothing there).
/// With `mode` unset, each entry is judged in the mode it records. Reports
/// the first violating entry.
inline Verdict check_guar_job(const Trace& trace, const JobId& id, std::optional<Mode> mode = std::nullopt)
{
    bool seen = false;
    Verdict verdict;
    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        const auto& entry = trace.entries[i];
        auto it = entry.state.active.find(id);
        if (it == entry.state.active.end()) {
            continue;
        }
        seen = true;
        const Job& job = it->second;
        const Mode judged = mode.value_or(entry.mode);
        quanta_t bound = job.info.wcet.count();
        if (judged == Mode::resilient) {
            if (!job.info.crit.is_hi()) {
                continue;
            }
            bound += job.info.crit.extra().count();
        }
        if (job.executed.count() > bound) {
            verdict.findings.push_back(detail::finding_at(
                trace, i, "guar-JOB(" + id.str() + ")",
                std::string(to_string(judged)) + " budget " + std::to_string(bound) + " exceeded: " +
                    detail::describe(id, job, entry.state.t)));
            break;
        }
    }
    if (!seen) {
        throw Error("check_guar_job: job '" + id.str() + "' does not appear in the trace");
    }
    return verdict;
}

/// check_guar_job for every job id that appears in the trace, in id order.
inline Verdict check_guar_jobs(const Trace& trace, std::optional<Mode> mode = std::nullopt)
{
    std::map<JobId, bool> ids;
    for (const auto& entry : trace.entries) {
        for (const auto& [id, job] : entry.state.active) {
            ids[id] = true;
        }
    }
    Verdict verdict;
    for (const auto& [id, unused] : ids) {
        verdict.merge(check_guar_job(trace, id, mode));
    }
    std::stable_sort(verdict.findings.begin(), verdict.findings.end(),
                     [](const Finding& x, const Finding& y) { return x.index < y.index; });
    return verdict;
}

struct RelyClauses {
    bool budget = true; // e' <= C (optimistic) / e' <= C + X for hi-crit (resilient)
    bool frame = true;  // info unchanged; run unchanged (optimistic) or non-decreasing (resilient)
};

/// The scheduler's rely condition over every environment step (any actor but
/// the scheduler). The first entry is treated as a step from the empty state.
/// Unlabelled traces are rejected since steps cannot be attributed.
inline Verdict check_rely_scheduler(const Trace& trace, std::optional<Mode> mode = std::nullopt,
                                    RelyClauses clauses = {})
{
    for (const auto& entry : trace.entries) {
        if (!entry.actor) {
            throw Error("check_rely_scheduler: trace entries lack actor labels");
        }
    }

    static const State empty{};
    Verdict verdict;
    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        const auto& entry = trace.entries[i];
        if (!entry.actor->is_environment()) {
            continue;
        }
        const State& before = i == 0 ? empty : trace.entries[i - 1].state;
        const State& after = entry.state;
        const Mode judged = mode.value_or(entry.mode);
        const std::string predicate = judged == Mode::optimistic ? "rely-SCHEDULER_O" : "rely-SCHEDULER_R";
        const std::string step = "step by " + entry.actor->label() + ": ";

        for (const auto& [id, job] : after.active) {
            if (clauses.budget) {
                if (judged == Mode::optimistic && job.executed > job.info.wcet) {
                    verdict.findings.push_back(detail::finding_at(
                        trace, i, predicate, step + "e' > C for " + detail::describe(id, job, after.t)));
                } else if (judged == Mode::resilient && job.info.crit.is_hi() &&
                           job.executed > job.info.wcet + job.info.crit.extra()) {
                    verdict.findings.push_back(detail::finding_at(
                        trace, i, predicate, step + "e' > C + X for " + detail::describe(id, job, after.t)));
                }
            }
            if (!clauses.frame) {
                continue;
            }
            auto prev = before.active.find(id);
            if (prev == before.active.end()) {
                continue;
            }
            if (prev->second.info != job.info) {
                verdict.findings.push_back(
                    detail::finding_at(trace, i, predicate, step + "info of " + id.str() + " changed"));
            }
            const bool run_ok = judged == Mode::optimistic ? prev->second.run == job.run : prev->second.run <= job.run;
            if (!run_ok) {
                verdict.findings.push_back(detail::finding_at(
                    trace, i, predicate,
                    step + "run of " + id.str() + " changed " + (prev->second.run ? "true" : "false") + " -> " +
                        (job.run ? "true" : "false")));
            }
        }
    }
    return verdict;
}

/// inv-State_O on every entry recorded in optimistic mode.
inline Verdict check_inv_O(const Trace& trace)
{
    Verdict verdict;
    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        const auto& entry = trace.entries[i];
        if (entry.mode != Mode::optimistic || inv_state_O(entry.state)) {
            continue;
        }
        std::string detail = "C - e > d - t for";
        for (const auto& [id, job] : entry.state.active) {
            if (optimistic_slack(job, entry.state.t) < 0) {
                detail += " [" + detail::describe(id, job, entry.state.t) + "]";
            }
        }
        verdict.findings.push_back(detail::finding_at(trace, i, "inv-State_O", detail));
    }
    return verdict;
}

/// inv-State_R on every entry recorded in resilient mode.
inline Verdict check_inv_R(const Trace& trace)
{
    Verdict verdict;
    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        const auto& entry = trace.entries[i];
        if (entry.mode != Mode::resilient || inv_state_R(entry.state)) {
            continue;
        }
        std::string detail = "C + X - e > d - t for";
        for (const auto& [id, job] : entry.state.active) {
            if (job.info.crit.is_hi() && resilient_slack(job, entry.state.t) < 0) {
                detail += " [" + detail::describe(id, job, entry.state.t) + "]";
            }
        }
        verdict.findings.push_back(detail::finding_at(trace, i, "inv-State_R", detail));
    }
    return verdict;
}

/// Deadline outcomes: every hi-crit job must meet its deadline; a lo-crit job
/// may miss only once the run is in resilient mode.
inline Verdict check_deadlines(const Trace& trace)
{
    detail::require_nonempty(trace, "check_deadlines");
    Verdict verdict;
    for (const auto& [id, out] : compute_outcomes(trace.entries)) {
        if (out.kind != OutcomeKind::missed) {
            continue;
        }
        if (!out.crit.is_hi() && out.mode == Mode::resilient) {
            continue;
        }
        std::size_t index = 0;
        while (index + 1 < trace.entries.size() && trace.entries[index].alpha < out.at) {
            ++index;
        }
        std::string detail = id.str() + " (d=" + std::to_string(out.deadline.count()) + ") ";
        detail += out.finished ? "completed at t=" + std::to_string(out.finished->count()) : "never completed";
        verdict.findings.push_back(detail::finding_at(trace, index, "deadline", detail));
    }
    std::stable_sort(verdict.findings.begin(), verdict.findings.end(),
                     [](const Finding& x, const Finding& y) { return x.index < y.index; });
    return verdict;
}

} // namespace mcs
