#pragma once

// Umbrella header: dense symmetric operators, linear solvers, the coupled
// power / shifted-inverse iteration targeting a pre-selected eigenvalue of a
// second commuting operator, spectrum construction, the brute-force Jacobi
// oracle, and convergence diagnostics.

#include "copower/operators.hpp"
#include "copower/solvers.hpp"
#include "copower/spectrum.hpp"
#include "copower/iteration.hpp"
#include "copower/diagnostics.hpp"
#include "copower/problem.hpp"
#include "copower/trace_io.hpp"
#include "copower/reproduce.hpp"
