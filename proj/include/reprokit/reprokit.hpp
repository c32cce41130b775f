#pragma once

// Umbrella header: the whole toolkit in one include.

#include "reprokit/effects.hpp"
#include "reprokit/errors.hpp"
#include "reprokit/eval.hpp"
#include "reprokit/fidelity.hpp"
#include "reprokit/numerics.hpp"
#include "reprokit/ordering.hpp"
#include "reprokit/report.hpp"
#include "reprokit/run_model.hpp"
#include "reprokit/stats.hpp"
