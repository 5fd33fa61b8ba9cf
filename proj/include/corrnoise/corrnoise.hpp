#pragma once

#include "corrnoise/analytic.hpp"
#include "corrnoise/entanglement.hpp"
#include "corrnoise/errors.hpp"
#include "corrnoise/experiments.hpp"
#include "corrnoise/integrate.hpp"
#include "corrnoise/linalg.hpp"
#include "corrnoise/model.hpp"
#include "corrnoise/trajectories.hpp"
#include "corrnoise/xstate.hpp"
