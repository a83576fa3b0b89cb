#ifndef PBIT_PBIT_HPP
#define PBIT_PBIT_HPP

#include "pbit/analysis.hpp"
#include "pbit/error.hpp"
#include "pbit/experiments.hpp"
#include "pbit/invlogic.hpp"
#include "pbit/io.hpp"
#include "pbit/ising.hpp"
#include "pbit/rng.hpp"
#include "pbit/sampler.hpp"
#include "pbit/sparsify.hpp"

#endif  // PBIT_PBIT_HPP
