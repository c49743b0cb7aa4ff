#pragma once

#include "renyi/errors.hpp"
#include "renyi/rational.hpp"
#include "renyi/polynomial.hpp"
#include "renyi/piecewise_poly.hpp"
#include "renyi/serialization.hpp"
#include "renyi/grid_function.hpp"
#include "renyi/entropy.hpp"
#include "renyi/generalized_gaussian.hpp"
#include "renyi/euler_lagrange.hpp"
#include "renyi/solver.hpp"
