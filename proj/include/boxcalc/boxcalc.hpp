#pragma once

#include "boxcalc/error.hpp"
#include "boxcalc/grid.hpp"
#include "boxcalc/box_derivative.hpp"
#include "boxcalc/scale_limit.hpp"
#include "boxcalc/holder.hpp"
#include "boxcalc/quadrature.hpp"
#include "boxcalc/identities.hpp"
#include "boxcalc/lagrangian.hpp"
#include "boxcalc/euler_lagrange.hpp"
#include "boxcalc/gateaux.hpp"
#include "boxcalc/solver.hpp"
#include "boxcalc/expression.hpp"
