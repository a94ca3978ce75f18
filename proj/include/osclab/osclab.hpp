#pragma once

// Umbrella header.

#include "osclab/errors.hpp"
#include "osclab/rational.hpp"
#include "osclab/summation.hpp"
#include "osclab/parallel.hpp"
#include "osclab/random.hpp"
#include "osclab/seminorms.hpp"
#include "osclab/brute_force.hpp"
#include "osclab/polynomial.hpp"
#include "osclab/lattice.hpp"
#include "osclab/fft.hpp"
#include "osclab/operators.hpp"
#include "osclab/projections.hpp"
#include "osclab/compose.hpp"
#include "osclab/long_short.hpp"
#include "osclab/io.hpp"
#include "osclab/report.hpp"
#include "osclab/harness.hpp"
