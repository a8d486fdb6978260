#pragma once

// Umbrella header for the evolutionary-machine library.

#include "etm/analysis.hpp"
#include "etm/distance.hpp"
#include "etm/engine.hpp"
#include "etm/errors.hpp"
#include "etm/experiment.hpp"
#include "etm/genome.hpp"
#include "etm/objective.hpp"
#include "etm/operators.hpp"
#include "etm/oracle.hpp"
#include "etm/parallel.hpp"
#include "etm/rng.hpp"
#include "etm/serialize.hpp"
#include "etm/trace_io.hpp"
