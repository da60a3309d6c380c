#include <gtest/gtest.h>

#include <random>

#include "mcs/monitors.hpp"
#include "mcs/sim.hpp"
#include "oracles.hpp"

namespace mcs {
namespace {

Job make_job(quanta_t e, bool run, quanta_t d, quanta_t c, Criticality crit = Criticality::lo())
{
    return Job{Duration(e), run, JobInfo{ClockValue(d), Duration(c), crit}};
}

State paper_state(quanta_t t)
{
    State s{ClockValue(t), {}};
    s.active.emplace(JobId("a"), make_job(10, true, 56, 15, Criticality::hi(Duration(3))));
    return s;
}

TraceEntry entry(quanta_t alpha, State s, std::optional<Actor> actor = Actor::time(), Mode mode = Mode::optimistic)
{
    return TraceEntry{GroundTime(alpha), std::move(s), std::move(actor), std::nullopt, mode};
}

State single(quanta_t t, const char* id, Job job)
{
    State s{ClockValue(t), {}};
    s.active.emplace(JobId(id), job);
    return s;
}

TEST(Invariants, PaperExample)
{
    EXPECT_FALSE(inv_state_O(paper_state(52)));
    EXPECT_TRUE(inv_state_O(paper_state(51)));
    EXPECT_FALSE(inv_state_R(paper_state(52)));
    EXPECT_TRUE(inv_state_R(paper_state(48)));
    EXPECT_TRUE(inv_state_O(State{}));
}

TEST(Invariants, ResilientIgnoresLoCrit)
{
    State s{ClockValue(50), {}};
    s.active.emplace(JobId("l"), make_job(0, false, 51, 10));
    EXPECT_TRUE(inv_state_R(s));
    EXPECT_FALSE(inv_state_O(s));
}

TEST(Invariants, ExceededBudgetIsSigned)
{
    // e > C: C - e is negative, satisfied even past the deadline by less than the overrun
    EXPECT_TRUE(inv_state_O(single(12, "a", make_job(8, true, 10, 5))));
}

TEST(ModeTransition, Examples)
{
    EXPECT_FALSE(check_mode_transition(paper_state(52)));
    EXPECT_TRUE(check_mode_transition(paper_state(48)));

    State zero{ClockValue(3), {}};
    zero.active.emplace(JobId("h"), make_job(2, true, 10, 5, Criticality::hi(Duration(0))));
    ASSERT_TRUE(inv_state_O(zero));
    EXPECT_TRUE(check_mode_transition(zero));
}

TEST(CheckPt, Examples)
{
    Trace clean{TimeBand{"1q", Duration(0)}, {entry(0, State{ClockValue(0), {}}), entry(1, State{ClockValue(1), {}})}};
    EXPECT_TRUE(check_P_t(clean, clean.band).pass());

    Trace skewed{TimeBand{"1q", Duration(1)}, {entry(99, State{ClockValue(99), {}}), entry(100, State{ClockValue(102), {}})}};
    const Verdict v = check_P_t(skewed, skewed.band);
    ASSERT_EQ(v.findings.size(), 1u);
    EXPECT_EQ(v.findings[0].predicate, "P_t");
    EXPECT_EQ(v.findings[0].at, GroundTime(100));
    EXPECT_EQ(v.findings[0].index, 1u);

    EXPECT_THROW(check_P_t(Trace{}, TimeBand{}), Error);
}

TEST(CheckPe, RunningAndIdleClauses)
{
    const TimeBand band{"1q", Duration(0)};
    Trace ran{band, {entry(0, single(0, "a", make_job(0, true, 20, 10))), entry(5, single(5, "a", make_job(5, true, 20, 10)))}};
    EXPECT_TRUE(check_P_e(ran, band).pass());

    Trace idle{band, {entry(5, single(5, "a", make_job(5, false, 20, 10))), entry(9, single(9, "a", make_job(6, false, 20, 10)))}};
    const Verdict v = check_P_e(idle, band);
    ASSERT_EQ(v.findings.size(), 1u);
    EXPECT_EQ(v.findings[0].predicate, "P_e");
    EXPECT_NE(v.findings[0].detail.find("idle"), std::string::npos);

    Trace short_run{band, {entry(0, single(0, "a", make_job(0, true, 20, 10))), entry(5, single(5, "a", make_job(4, true, 20, 10)))}};
    EXPECT_FALSE(check_P_e(short_run, band).pass());
}

TEST(CheckPe, ClockToleranceIsTwoRho)
{
    const TimeBand band{"1q", Duration(1)};
    // ground truth exact, clock reads off by -1 then +1
    Trace t{band, {entry(10, single(9, "a", make_job(0, true, 40, 10))), entry(15, single(16, "a", make_job(5, true, 40, 10)))}};
    EXPECT_TRUE(check_P_e(t, band).pass());
    Trace worse{band, {entry(10, single(8, "a", make_job(0, true, 40, 10))), entry(15, single(16, "a", make_job(5, true, 40, 10)))}};
    EXPECT_FALSE(check_P_e(worse, band).pass());
}

TEST(CheckPe, RandomizedEightJobRunAgreesWithIntervalSums)
{
    GeneratorBounds b;
    b.min_jobs = 8;
    b.max_jobs = 8;
    b.wcet_max = 6;
    b.deadline_max = 20;
    b.arrival_max = 30;
    for (const auto& w : generate_workloads(2024, 20, b)) {
        const Trace trace = run(RunConfig{w, PolicyId::edf, std::nullopt, 5});
        EXPECT_TRUE(check_P_e(trace, trace.band).pass());
        EXPECT_FALSE(oracle::first_interval_sum_mismatch(trace).has_value());
    }
}

TEST(CheckGuar, Examples)
{
    const auto hi = Criticality::hi(Duration(3));
    Trace at_bound{TimeBand{}, {entry(0, single(0, "a", make_job(15, true, 60, 15, hi)))}};
    EXPECT_TRUE(check_guar_job(at_bound, JobId("a"), Mode::optimistic).pass());

    Trace over{TimeBand{}, {entry(0, single(0, "a", make_job(15, true, 60, 15, hi))),
                            entry(1, single(1, "a", make_job(16, true, 60, 15, hi))),
                            entry(2, single(2, "a", make_job(17, true, 60, 15, hi)))}};
    const Verdict v = check_guar_job(over, JobId("a"), Mode::optimistic);
    ASSERT_EQ(v.findings.size(), 1u);
    EXPECT_EQ(v.findings[0].predicate, "guar-JOB(a)");
    EXPECT_EQ(v.findings[0].at, GroundTime(1));

    EXPECT_TRUE(check_guar_job(over, JobId("a"), Mode::resilient).pass());
    EXPECT_THROW(check_guar_job(over, JobId("zz"), Mode::optimistic), Error);
}

TEST(CheckGuar, LoCritUnconstrainedInResilientMode)
{
    Trace t{TimeBand{}, {entry(0, single(0, "l", make_job(9, true, 60, 4)), Actor::time(), Mode::resilient)}};
    EXPECT_TRUE(check_guar_job(t, JobId("l"), Mode::resilient).pass());
    EXPECT_FALSE(check_guar_job(t, JobId("l"), Mode::optimistic).pass());
    // unset mode: the entry's own mode applies
    EXPECT_TRUE(check_guar_job(t, JobId("l")).pass());
}

TEST(CheckRely, Examples)
{
    Trace clean{TimeBand{}, {entry(0, single(0, "a", make_job(0, true, 30, 15))),
                             entry(1, single(1, "a", make_job(1, true, 30, 15)))}};
    EXPECT_TRUE(check_rely_scheduler(clean, Mode::optimistic).pass());

    Job moved = make_job(1, true, 31, 15);
    Trace info_changed{TimeBand{}, {entry(0, single(0, "a", make_job(0, true, 30, 15))),
                                    entry(1, single(1, "a", moved))}};
    const Verdict v = check_rely_scheduler(info_changed, Mode::optimistic);
    ASSERT_EQ(v.findings.size(), 1u);
    EXPECT_NE(v.findings[0].detail.find("info"), std::string::npos);

    Trace overrun{TimeBand{}, {entry(15, single(15, "a", make_job(15, true, 30, 15))),
                               entry(16, single(16, "a", make_job(16, true, 30, 15)))}};
    const Verdict o = check_rely_scheduler(overrun, Mode::optimistic);
    ASSERT_EQ(o.findings.size(), 1u);
    EXPECT_EQ(o.findings[0].predicate, "rely-SCHEDULER_O");
    EXPECT_EQ(o.findings[0].at, GroundTime(16));
}

TEST(CheckRely, SchedulerStepsAreNotEnvironment)
{
    Trace t{TimeBand{}, {entry(0, single(0, "a", make_job(0, false, 30, 15))),
                         entry(0, single(0, "a", make_job(0, true, 30, 15)), Actor::scheduler())}};
    EXPECT_TRUE(check_rely_scheduler(t, Mode::optimistic).pass());
    // the same flip attributed to time breaks the frame
    t.entries[1].actor = Actor::time();
    EXPECT_FALSE(check_rely_scheduler(t, Mode::optimistic).pass());
    // in resilient mode the environment may raise run but not lower it
    EXPECT_TRUE(check_rely_scheduler(t, Mode::resilient).pass());
    std::swap(t.entries[0].state, t.entries[1].state);
    EXPECT_FALSE(check_rely_scheduler(t, Mode::resilient).pass());
}

TEST(CheckRely, UnlabelledTraceRejected)
{
    Trace t{TimeBand{}, {entry(0, State{}, std::nullopt)}};
    EXPECT_THROW(check_rely_scheduler(t), Error);
}

TEST(Theorems, OptimisticWithZeroExtraImpliesResilient)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10000; ++trial) {
        State s{ClockValue(static_cast<quanta_t>(rng() % 60)), {}};
        const int n = static_cast<int>(rng() % 6);
        for (int j = 0; j < n; ++j) {
            const quanta_t c = 1 + static_cast<quanta_t>(rng() % 15);
            const auto crit = rng() % 2 ? Criticality::hi(Duration(0)) : Criticality::lo();
            s.active.emplace(JobId("j" + std::to_string(j)),
                             make_job(static_cast<quanta_t>(rng() % (c + 1)), rng() % 2,
                                      static_cast<quanta_t>(rng() % 80), c, crit));
        }
        if (inv_state_O(s)) {
            EXPECT_TRUE(inv_state_R(s));
        }
        EXPECT_NO_THROW(check_mode_transition(s));
        // keeping the resilient reserve is trivially enough
        if (inv_state_R(s) && inv_state_O(s)) {
            EXPECT_TRUE(inv_state_R(s));
        }
    }
}

TEST(Invariants, ResilientIsAntitoneInClock)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5000; ++trial) {
        State s{ClockValue(0), {}};
        const int n = 1 + static_cast<int>(rng() % 4);
        for (int j = 0; j < n; ++j) {
            s.active.emplace(JobId("j" + std::to_string(j)),
                             make_job(static_cast<quanta_t>(rng() % 10), false, static_cast<quanta_t>(rng() % 60),
                                      1 + static_cast<quanta_t>(rng() % 12),
                                      Criticality::hi(Duration(static_cast<quanta_t>(rng() % 5)))));
        }
        const quanta_t t2 = static_cast<quanta_t>(rng() % 60);
        s.t = ClockValue(t2);
        if (!inv_state_R(s)) {
            continue;
        }
        for (quanta_t t1 = 0; t1 <= t2; ++t1) {
            s.t = ClockValue(t1);
            EXPECT_TRUE(inv_state_R(s));
        }
    }
}

TEST(Monitors, GuaranteeImpliesRelyBudgetOnSimulatedRuns)
{
    GeneratorBounds b;
    b.max_jobs = 5;
    b.wcet_max = 6;
    b.deadline_max = 16;
    b.arrival_max = 20;
    b.extra_max = 3;
    b.hi_percent = 50;
    std::uint64_t seed = 0;
    for (const auto& w : generate_workloads(99, 100, b)) {
        for (auto policy : {PolicyId::edf, PolicyId::edf_ab, PolicyId::cr_edf, PolicyId::naive_rr}) {
            const Trace trace = run(RunConfig{w, policy, std::nullopt, ++seed});
            const Verdict rely = check_rely_scheduler(trace, std::nullopt, RelyClauses{true, false});
            if (check_guar_jobs(trace).pass()) {
                EXPECT_TRUE(rely.pass());
            }
            EXPECT_EQ(check_P_e(trace, trace.band), check_P_e(trace, trace.band));
            EXPECT_EQ(check_rely_scheduler(trace), check_rely_scheduler(trace));
        }
    }
}

} // namespace
} // namespace mcs
