#pragma once

#include "errors.hpp"
#include "polynomial.hpp"
#include "potential.hpp"
#include "lyapunov.hpp"
#include "combinatorial.hpp"
#include "band_structure.hpp"
#include "asymptotics.hpp"
#include "inverse_solver.hpp"
