#pragma once

#include "vifd/errors.hpp"
#include "vifd/linear_system.hpp"
#include "vifd/qp.hpp"
#include "vifd/sets.hpp"
#include "vifd/operators.hpp"
#include "vifd/solver.hpp"
#include "vifd/bench.hpp"
