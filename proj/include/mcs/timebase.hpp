#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

#include "mcs/jobs.hpp"
#include "mcs/time.hpp"

namespace mcs {

/// Seeded source of per-quantum clock offsets, bounded by `bound` and never
/// accumulating: each quantum draws a fresh offset in [-bound, bound].
class DriftSource {
public:
    enum class Model { none, bounded_random };

    DriftSource() = default;
    DriftSource(Model model, std::uint64_t seed, Duration bound)
        : model_(model), seed_(seed), bound_(bound), engine_(seed)
    {
    }

    static DriftSource none() { return {}; }
    static DriftSource bounded_random(std::uint64_t seed, Duration bound)
    {
        return DriftSource(Model::bounded_random, seed, bound);
    }

    Model model() const noexcept { return model_; }
    std::uint64_t seed() const noexcept { return seed_; }
    Duration bound() const noexcept { return bound_; }

    quanta_t sample()
    {
        if (model_ == Model::none || bound_.count() == 0) {
            return 0;
        }
        std::uniform_int_distribution<quanta_t> offset(-bound_.count(), bound_.count());
        return offset(engine_);
    }

private:
    Model model_ = Model::none;
    std::uint64_t seed_ = 0;
    Duration bound_{};
    std::mt19937_64 engine_{0};
};

/// Ground truth of a simulation: real time, the clock's drift source, and the
/// machine state observed at that instant.
struct World {
    GroundTime alpha;
    DriftSource drift;
    State state;
};

/// The passage of time over [alpha, alpha + dt]. Running jobs accrue exactly
/// dt of execution on the ground-truth axis; the clock lands within the band
/// precision of the new alpha. Nothing else in the state changes.
inline World advance_world(World world, Duration dt, const TimeBand& band)
{
    if (dt.count() == 0) {
        throw Error("advance_world: dt must be at least one quantum");
    }
    if (world.drift.bound() > band.precision) {
        throw Error("advance_world: drift bound exceeds band precision");
    }

    quanta_t offset = 0;
    for (quanta_t q = 0; q < dt.count(); ++q) {
        offset = world.drift.sample();
    }

    world.alpha = world.alpha + dt;
    // clamp so the clock never reads below zero
    const quanta_t reading = std::max<quanta_t>(0, world.alpha.count() + offset);
    world.state.t = ClockValue(reading);

    for (auto& [id, job] : world.state.active) {
        if (job.run) {
            job.executed += dt;
        }
    }
    return world;
}

} // namespace mcs
