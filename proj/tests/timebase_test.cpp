#include <gtest/gtest.h>

#include <random>

#include "mcs/timebase.hpp"

namespace mcs {
namespace {

State one_job(quanta_t t, const char* id, quanta_t e, bool run)
{
    State s{ClockValue(t), {}};
    s.active.emplace(JobId(id), Job{Duration(e), run, JobInfo{ClockValue(100), Duration(20), Criticality::lo()}});
    return s;
}

TEST(RhoEq, Examples)
{
    EXPECT_TRUE(rho_eq(10, 10, Duration(0)));
    EXPECT_TRUE(rho_eq(52, 53, Duration(1)));
    EXPECT_FALSE(rho_eq(10, 12, Duration(1)));
    EXPECT_TRUE(rho_eq(12, 10, Duration(2)));
}

TEST(Quantities, NegativeValuesRejected)
{
    EXPECT_THROW(Duration(-1), Error);
    EXPECT_THROW(GroundTime(-3), Error);
    EXPECT_EQ(ClockValue(7) + Duration(10), ClockValue(17));
    EXPECT_EQ(ClockValue(4) - ClockValue(9), -5);
}

TEST(AdvanceWorld, RunningJobAccruesExactly)
{
    World w{GroundTime(0), DriftSource::none(), one_job(0, "a", 0, true)};
    const World next = advance_world(w, Duration(5), TimeBand{"1ms", Duration(0)});
    EXPECT_EQ(next.alpha, GroundTime(5));
    EXPECT_EQ(next.state.t, ClockValue(5));
    EXPECT_EQ(next.state.active.at(JobId("a")).executed, Duration(5));
}

TEST(AdvanceWorld, IdleJobAccruesNothing)
{
    World w{GroundTime(0), DriftSource::none(), one_job(0, "b", 3, false)};
    const World next = advance_world(w, Duration(7), TimeBand{"1ms", Duration(0)});
    EXPECT_EQ(next.state.active.at(JobId("b")).executed, Duration(3));
    EXPECT_FALSE(next.state.active.at(JobId("b")).run);
}

TEST(AdvanceWorld, DriftingClockStaysWithinPrecision)
{
    const TimeBand band{"1ms", Duration(1)};
    World w{GroundTime(10), DriftSource::bounded_random(42, Duration(1)), one_job(10, "a", 0, true)};
    const World next = advance_world(w, Duration(5), band);
    EXPECT_EQ(next.state.active.at(JobId("a")).executed, Duration(5));
    EXPECT_GE(next.state.t.count(), 14);
    EXPECT_LE(next.state.t.count(), 16);

    // the offset is the last of five per-quantum draws from the seeded engine
    std::mt19937_64 engine(42);
    quanta_t offset = 0;
    for (int q = 0; q < 5; ++q) {
        offset = std::uniform_int_distribution<quanta_t>(-1, 1)(engine);
    }
    EXPECT_EQ(next.state.t.count(), 15 + offset);
}

TEST(AdvanceWorld, RejectsZeroStep)
{
    World w{GroundTime(0), DriftSource::none(), State{}};
    EXPECT_THROW(advance_world(w, Duration(0), TimeBand{}), Error);
}

TEST(AdvanceWorld, RejectsDriftBeyondPrecision)
{
    World w{GroundTime(0), DriftSource::bounded_random(1, Duration(2)), State{}};
    EXPECT_THROW(advance_world(w, Duration(1), TimeBand{"1ms", Duration(1)}), Error);
}

TEST(AdvanceWorld, PropertiesOverRandomWorlds)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const quanta_t rho = static_cast<quanta_t>(rng() % 3);
        const TimeBand band{"1q", Duration(rho)};
        State s{ClockValue(0), {}};
        const int jobs = static_cast<int>(rng() % 5);
        for (int j = 0; j < jobs; ++j) {
            s.active.emplace(JobId("j" + std::to_string(j)),
                             Job{Duration(static_cast<quanta_t>(rng() % 10)), (rng() % 2) == 0,
                                 JobInfo{ClockValue(static_cast<quanta_t>(rng() % 50)),
                                         Duration(1 + static_cast<quanta_t>(rng() % 9)), Criticality::lo()}});
        }
        const auto alpha = static_cast<quanta_t>(rng() % 100);
        s.t = ClockValue(alpha);
        World w{GroundTime(alpha), DriftSource::bounded_random(rng(), Duration(rho)), s};
        const Duration dt(1 + static_cast<quanta_t>(rng() % 6));

        const World a = advance_world(w, dt, band);
        const World b = advance_world(w, dt, band);
        EXPECT_EQ(a.state, b.state);

        EXPECT_TRUE(rho_eq(a.state.t.count(), a.alpha.count(), band.precision));
        EXPECT_EQ(a.alpha, w.alpha + dt);
        ASSERT_EQ(a.state.active.size(), w.state.active.size());
        for (const auto& [id, job] : w.state.active) {
            const Job& after = a.state.active.at(id);
            EXPECT_EQ(after.run, job.run);
            EXPECT_EQ(after.info, job.info);
            EXPECT_EQ(after.executed, job.run ? job.executed + dt : job.executed);
        }
    }
}

} // namespace
} // namespace mcs
