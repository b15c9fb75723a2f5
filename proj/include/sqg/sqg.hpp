#pragma once

// Umbrella header.

#include "sqg/config.hpp"
#include "sqg/diagnostics.hpp"
#include "sqg/error.hpp"
#include "sqg/field.hpp"
#include "sqg/functionals.hpp"
#include "sqg/io.hpp"
#include "sqg/modulus.hpp"
#include "sqg/quadrature.hpp"
#include "sqg/solver.hpp"
#include "sqg/spectral.hpp"
#include "sqg/verification.hpp"
