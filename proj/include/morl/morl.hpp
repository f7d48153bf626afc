#pragma once

// Umbrella header.

#include "morl/momdp.hpp"
#include "morl/random.hpp"
#include "morl/dynamic_programming.hpp"
#include "morl/generators.hpp"
#include "morl/model_estimation.hpp"
#include "morl/optimistic_planning.hpp"
#include "morl/preference_sources.hpp"
#include "morl/online.hpp"
#include "morl/pfe.hpp"
#include "morl/hard_instances.hpp"
#include "morl/io.hpp"
#include "morl/harness.hpp"
