// Umbrella header.
#pragma once

#include "fogsim/application.hpp"
#include "fogsim/engine.hpp"
#include "fogsim/errors.hpp"
#include "fogsim/experiment.hpp"
#include "fogsim/io.hpp"
#include "fogsim/placement.hpp"
#include "fogsim/runtime.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/sim_time.hpp"
#include "fogsim/topology.hpp"
