#ifndef DFO_DFO_HPP
#define DFO_DFO_HPP

#include "dfo/baselines.hpp"
#include "dfo/core.hpp"
#include "dfo/csv.hpp"
#include "dfo/dfb.hpp"
#include "dfo/dfc.hpp"
#include "dfo/experiment.hpp"
#include "dfo/gdf.hpp"
#include "dfo/gradapprox.hpp"
#include "dfo/oracle.hpp"
#include "dfo/plot.hpp"
#include "dfo/problems.hpp"
#include "dfo/rate.hpp"
#include "dfo/trace.hpp"

#endif // DFO_DFO_HPP
