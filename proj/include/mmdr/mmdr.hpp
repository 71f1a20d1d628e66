#pragma once

/// Umbrella header for the library.  The download helper (mnist_fetch.hpp) is
/// excluded on purpose: it is the only part that needs curl and zlib.

#include "mmdr/common.hpp"
#include "mmdr/config.hpp"
#include "mmdr/dr_core.hpp"
#include "mmdr/experiments.hpp"
#include "mmdr/fit_io.hpp"
#include "mmdr/grid.hpp"
#include "mmdr/idx.hpp"
#include "mmdr/io_util.hpp"
#include "mmdr/metrics.hpp"
#include "mmdr/mnist_bench.hpp"
#include "mmdr/model_gen.hpp"
#include "mmdr/parallel.hpp"
#include "mmdr/perlin.hpp"
#include "mmdr/rng.hpp"
#include "mmdr/svg.hpp"
