#pragma once

#include "oisma/accumulator.hpp"
#include "oisma/array_sim.hpp"
#include "oisma/bench.hpp"
#include "oisma/bp.hpp"
#include "oisma/dataflow.hpp"
#include "oisma/errors.hpp"
#include "oisma/matrix.hpp"
#include "oisma/minifloat.hpp"
#include "oisma/perf_model.hpp"
