#pragma once

// Umbrella header: the whole library.

#include "sweeping/acceptance.hpp"
#include "sweeping/cones.hpp"
#include "sweeping/constraint_set.hpp"
#include "sweeping/crowd.hpp"
#include "sweeping/csv.hpp"
#include "sweeping/errors.hpp"
#include "sweeping/moving_set.hpp"
#include "sweeping/rng.hpp"
#include "sweeping/runner.hpp"
#include "sweeping/scenario.hpp"
#include "sweeping/sde.hpp"
#include "sweeping/sets.hpp"
#include "sweeping/skorohod.hpp"
#include "sweeping/time_grid.hpp"
#include "sweeping/vec.hpp"
#include "sweeping/version.hpp"
