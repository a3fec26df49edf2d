#pragma once

#include "brute_force.hpp"
#include "centroid.hpp"
#include "distance.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "matrix.hpp"
#include "model.hpp"
#include "reference.hpp"
#include "scalar_prox.hpp"
#include "solver.hpp"
