#pragma once

// Umbrella header: cycle-level simulator and static schedule compiler for a
// time-predictable multi-core vector architecture with scratchpad memories
// and a single-host DMA.

#include "predsim/analysis.hpp"
#include "predsim/config.hpp"
#include "predsim/kernel.hpp"
#include "predsim/machine.hpp"
#include "predsim/schedule.hpp"
#include "predsim/sim.hpp"
