#pragma once

#include "satphase/error.hpp"
#include "satphase/random.hpp"
#include "satphase/quadrature.hpp"
#include "satphase/turbulence.hpp"
#include "satphase/fft.hpp"
#include "satphase/propagation.hpp"
#include "satphase/phasesim.hpp"
#include "satphase/lstm.hpp"
#include "satphase/optimizer.hpp"
#include "satphase/estimator.hpp"
#include "satphase/bounds.hpp"
#include "satphase/io.hpp"
#include "satphase/harness.hpp"
