#pragma once

#include "benchmark.hpp"
#include "cig.hpp"
#include "forecast.hpp"
#include "fourier.hpp"
#include "glasso.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "network.hpp"
#include "parallel.hpp"
#include "simulate.hpp"
#include "spectral.hpp"
#include "surrogate.hpp"
#include "types.hpp"
#include "wavelet.hpp"
