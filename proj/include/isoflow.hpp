#pragma once

#include "isoflow/convolution.hpp"
#include "isoflow/diagnostics.hpp"
#include "isoflow/error.hpp"
#include "isoflow/grid.hpp"
#include "isoflow/kernel.hpp"
#include "isoflow/medium.hpp"
#include "isoflow/operator.hpp"
#include "isoflow/registry.hpp"
#include "isoflow/runner.hpp"
#include "isoflow/scenario.hpp"
#include "isoflow/snapshot.hpp"
#include "isoflow/solver.hpp"
#include "isoflow/suites.hpp"
#include "isoflow/trajectory.hpp"
#include "isoflow/verify.hpp"
