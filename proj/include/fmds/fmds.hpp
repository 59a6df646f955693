#pragma once

#include "fmds/datasets.hpp"
#include "fmds/dissimilarity.hpp"
#include "fmds/error.hpp"
#include "fmds/geometry.hpp"
#include "fmds/linalg.hpp"
#include "fmds/metrics.hpp"
#include "fmds/random.hpp"
#include "fmds/solver.hpp"
#include "fmds/wormhole.hpp"
