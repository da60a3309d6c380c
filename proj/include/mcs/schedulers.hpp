#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mcs/jobs.hpp"
#include "mcs/monitors.hpp"
#include "mcs/trace.hpp"

namespace mcs {

/// Run-time dispatching policies.
///  - edf: earliest deadline first, criticality-blind, never switches mode.
///  - edf_ab: edf until a hi-crit overrun is imminent, then resilient mode
///    with every lo-crit job abandoned.
///  - cr_edf: edf that refuses any step which would break the resilient
///    invariant at the next quantum boundary.
///  - naive_rr: one quantum per job in rotation, deadlines ignored.
enum class PolicyId { edf, cr_edf, edf_ab, naive_rr };

inline const char* to_string(PolicyId policy)
{
    switch (policy) {
    case PolicyId::edf: return "edf";
    case PolicyId::cr_edf: return "cr-edf";
    case PolicyId::edf_ab: return "edf-ab";
    case PolicyId::naive_rr: return "naive-rr";
    }
    return "?";
}

inline PolicyId parse_policy(const std::string& text)
{
    for (auto policy : {PolicyId::edf, PolicyId::cr_edf, PolicyId::edf_ab, PolicyId::naive_rr}) {
        if (text == to_string(policy)) {
            return policy;
        }
    }
    throw Error("unknown policy '" + text + "' (expected edf, cr-edf, edf-ab or naive-rr)");
}

struct Decision {
    std::set<JobId> run_set;
    std::set<JobId> stop_set;
    std::set<JobId> abandon_set;
    Mode new_mode = Mode::optimistic;

    bool operator==(const Decision&) const = default;
};

/// Per-run mutable policy state. Only naive-rr keeps any.
struct PolicyContext {
    std::optional<JobId> rr_cursor;
};

/// Active ids by ascending absolute deadline, ties broken by id.
inline std::vector<JobId> edf_order(const ActiveMap& active)
{
    std::vector<JobId> order;
    order.reserve(active.size());
    for (const auto& [id, job] : active) {
        order.push_back(id);
    }
    std::stable_sort(order.begin(), order.end(), [&](const JobId& a, const JobId& b) {
        return active.at(a).info.deadline < active.at(b).info.deadline;
    });
    return order;
}

/// Jobs whose execution already exceeds C.
inline std::set<JobId> detect_overrun(const State& state)
{
    std::set<JobId> over;
    for (const auto& [id, job] : state.active) {
        if (job.executed > job.info.wcet) {
            over.insert(id);
        }
    }
    return over;
}

namespace detail {

/// An overrun has happened, or a running hi-crit job has used all of C
/// without completing and will overrun in the next quantum.
inline bool overrun_imminent(const State& state)
{
    if (!detect_overrun(state).empty()) {
        return true;
    }
    return std::any_of(state.active.begin(), state.active.end(), [](const auto& kv) {
        const Job& job = kv.second;
        return job.info.crit.is_hi() && job.run && job.executed >= job.info.wcet;
    });
}

inline std::optional<JobId> earliest_deadline(const ActiveMap& active)
{
    auto order = edf_order(active);
    if (order.empty()) {
        return std::nullopt;
    }
    return order.front();
}

inline std::optional<JobId> choose_cr_edf(const State& state)
{
    auto pick = earliest_deadline(state.active);
    if (!pick) {
        return pick;
    }
    State next = state;
    next.t = state.t + Duration(1);
    next.active.at(*pick).executed += Duration(1);
    if (inv_state_R(next)) {
        return pick;
    }

    std::optional<JobId> tightest;
    quanta_t best = 0;
    for (const auto& [id, job] : state.active) {
        if (!job.info.crit.is_hi()) {
            continue;
        }
        const quanta_t slack = resilient_slack(job, state.t);
        if (!tightest || slack < best) {
            tightest = id;
            best = slack;
        }
    }
    return tightest ? tightest : pick;
}

inline std::optional<JobId> choose_round_robin(const State& state, PolicyContext& ctx)
{
    if (state.active.empty()) {
        return std::nullopt;
    }
    auto it = ctx.rr_cursor ? state.active.upper_bound(*ctx.rr_cursor) : state.active.begin();
    if (it == state.active.end()) {
        it = state.active.begin();
    }
    ctx.rr_cursor = it->first;
    return it->first;
}

} // namespace detail

/// One scheduling decision at a quantum boundary. The result only flips run
/// flags, abandons lo-crit jobs and (never backwards) changes mode; at most
/// one job is left running.
inline Decision decide(PolicyId policy, const State& state, Mode mode, PolicyContext& ctx)
{
    Decision decision;
    decision.new_mode = mode;

    State visible = state;
    std::optional<JobId> chosen;

    switch (policy) {
    case PolicyId::edf:
        chosen = detail::earliest_deadline(state.active);
        break;

    case PolicyId::edf_ab:
        if (mode == Mode::optimistic && detail::overrun_imminent(state)) {
            decision.new_mode = Mode::resilient;
        }
        if (decision.new_mode == Mode::resilient) {
            for (const auto& [id, job] : state.active) {
                if (!job.info.crit.is_hi()) {
                    decision.abandon_set.insert(id);
                    visible.active.erase(id);
                }
            }
        }
        chosen = detail::earliest_deadline(visible.active);
        break;

    case PolicyId::cr_edf:
        if (mode == Mode::optimistic && detail::overrun_imminent(state)) {
            decision.new_mode = Mode::resilient;
        }
        chosen = detail::choose_cr_edf(state);
        break;

    case PolicyId::naive_rr:
        chosen = detail::choose_round_robin(state, ctx);
        break;
    }

    for (const auto& [id, job] : visible.active) {
        const bool want = chosen && *chosen == id;
        if (want && !job.run) {
            decision.run_set.insert(id);
        } else if (!want && job.run) {
            decision.stop_set.insert(id);
        }
    }
    return decision;
}

inline Decision decide(PolicyId policy, const State& state, Mode mode)
{
    PolicyContext ctx;
    return decide(policy, state, mode, ctx);
}

} // namespace mcs
