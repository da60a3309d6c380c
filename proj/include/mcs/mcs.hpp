#pragma once

#include "mcs/analysis.hpp"
#include "mcs/io.hpp"
#include "mcs/jobs.hpp"
#include "mcs/monitors.hpp"
#include "mcs/schedulers.hpp"
#include "mcs/sim.hpp"
#include "mcs/time.hpp"
#include "mcs/timebase.hpp"
#include "mcs/trace.hpp"
#include "mcs/workload.hpp"
