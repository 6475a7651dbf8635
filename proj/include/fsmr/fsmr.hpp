#pragma once

#include "fsmr/basis.hpp"
#include "fsmr/benchmark.hpp"
#include "fsmr/blocks.hpp"
#include "fsmr/engine.hpp"
#include "fsmr/error.hpp"
#include "fsmr/geometry.hpp"
#include "fsmr/image.hpp"
#include "fsmr/io.hpp"
#include "fsmr/kernels.hpp"
#include "fsmr/metrics.hpp"
#include "fsmr/parallel.hpp"
#include "fsmr/report.hpp"
#include "fsmr/resample.hpp"
#include "fsmr/scattered.hpp"
#include "fsmr/weighting.hpp"
