#pragma once

#include "flexmr/bench.hpp"
#include "flexmr/bidiag.hpp"
#include "flexmr/core.hpp"
#include "flexmr/diagnostics.hpp"
#include "flexmr/inner.hpp"
#include "flexmr/matrix_market.hpp"
#include "flexmr/rotations.hpp"
#include "flexmr/solvers.hpp"
#include "flexmr/sparse_matrix.hpp"
