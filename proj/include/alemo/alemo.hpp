#pragma once

#include "alemo/benchmarks.hpp"
#include "alemo/classifier.hpp"
#include "alemo/core.hpp"
#include "alemo/geosim.hpp"
#include "alemo/harness.hpp"
#include "alemo/metrics.hpp"
#include "alemo/optimizer.hpp"
#include "alemo/pareto.hpp"
#include "alemo/rng.hpp"
#include "alemo/sampling.hpp"
#include "alemo/scenario.hpp"
#include "alemo/subspace.hpp"
#include "alemo/surrogate.hpp"
#include "alemo/variation.hpp"
