#pragma once

#include "beamcov/units.hpp"
#include "beamcov/geometry.hpp"
#include "beamcov/env_stats.hpp"
#include "beamcov/coverage_analytic.hpp"
#include "beamcov/scene_sim.hpp"
#include "beamcov/harness/config.hpp"
#include "beamcov/harness/experiments.hpp"
