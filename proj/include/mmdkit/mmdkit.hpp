#pragma once

// Umbrella header.

#include "mmdkit/benchmark.hpp"
#include "mmdkit/estimators.hpp"
#include "mmdkit/independence.hpp"
#include "mmdkit/io.hpp"
#include "mmdkit/kernels.hpp"
#include "mmdkit/matching.hpp"
#include "mmdkit/null_models.hpp"
#include "mmdkit/rng.hpp"
#include "mmdkit/synthetic.hpp"
#include "mmdkit/two_sample.hpp"
#include "mmdkit/types.hpp"
#include "mmdkit/version.hpp"
