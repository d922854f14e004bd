#pragma once

#include "errors.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "matrix.hpp"
#include "models.hpp"
#include "numerics.hpp"
#include "quantum.hpp"
#include "real.hpp"
#include "regression.hpp"
#include "signals.hpp"
#include "spectral.hpp"
#include "weights.hpp"
