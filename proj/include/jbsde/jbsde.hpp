#pragma once

#include "core/levy_measure.hpp"
#include "core/problem.hpp"
#include "core/registry.hpp"
#include "core/spatial_mesh.hpp"
#include "core/time_partition.hpp"
#include "harness/report_io.hpp"
#include "harness/study.hpp"
#include "interp/lagrange.hpp"
#include "oracle/mc.hpp"
#include "parallel.hpp"
#include "quad/atom_grid.hpp"
#include "quad/rules.hpp"
#include "solver/config.hpp"
#include "solver/scheme.hpp"
