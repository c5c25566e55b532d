#pragma once

// Explicit solution theory for the replicator-mutator equation
//   u_t = u_xx + (x - int x u) u
// and its quadratic-weight variant: closed-form solutions, tail-based
// classification, reductions to the heat equation, Airy solitary waves, and a
// direct PDE integrator that cross-validates every formula.

#include "rml/errors.hpp"
#include "rml/grid.hpp"
#include "rml/quadrature.hpp"
#include "rml/special.hpp"
#include "rml/profiles.hpp"
#include "rml/closedform.hpp"
#include "rml/reductions.hpp"
#include "rml/oracle.hpp"
#include "rml/waves.hpp"
