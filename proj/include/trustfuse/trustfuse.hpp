#pragma once

#include "trustfuse/model.hpp"
#include "trustfuse/probability.hpp"
#include "trustfuse/random.hpp"
#include "trustfuse/two_stage.hpp"
#include "trustfuse/aglrt.hpp"
#include "trustfuse/baselines.hpp"
#include "trustfuse/sim.hpp"
#include "trustfuse/experiment_spec.hpp"
#include "trustfuse/commands.hpp"
