#pragma once

// Umbrella header for the figdist library.

#include "figdist/dataset.hpp"
#include "figdist/distribution.hpp"
#include "figdist/eval.hpp"
#include "figdist/mle.hpp"
#include "figdist/oracle.hpp"
#include "figdist/quadrature.hpp"
#include "figdist/sampler.hpp"
#include "figdist/specfun.hpp"
