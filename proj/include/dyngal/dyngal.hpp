#pragma once

#include "dyngal/diagnostics.hpp"
#include "dyngal/equations.hpp"
#include "dyngal/errors.hpp"
#include "dyngal/grid.hpp"
#include "dyngal/oracle.hpp"
#include "dyngal/projectors.hpp"
#include "dyngal/scenario.hpp"
#include "dyngal/spectral.hpp"
#include "dyngal/timestepping.hpp"
#include "dyngal/wavelets.hpp"
