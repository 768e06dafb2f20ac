#pragma once

// Umbrella header for the whole library.

#include "enatp/cli.hpp"
#include "enatp/entanglement.hpp"
#include "enatp/errors.hpp"
#include "enatp/experiment.hpp"
#include "enatp/matcore.hpp"
#include "enatp/measurements.hpp"
#include "enatp/presets.hpp"
#include "enatp/sequences.hpp"
#include "enatp/states.hpp"
