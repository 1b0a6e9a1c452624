#pragma once

#include "uvot/core.hpp"
#include "uvot/calculus.hpp"
#include "uvot/prox.hpp"
#include "uvot/problem.hpp"
#include "uvot/elliptic.hpp"
#include "uvot/solver.hpp"
#include "uvot/oracles.hpp"
#include "uvot/io.hpp"
#include "uvot/fwi.hpp"
#include "uvot/experiments.hpp"
