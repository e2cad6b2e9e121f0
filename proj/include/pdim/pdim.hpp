#pragma once

#include "pdim/bits.hpp"
#include "pdim/rng.hpp"
#include "pdim/graph.hpp"
#include "pdim/cliques.hpp"
#include "pdim/schedule.hpp"
#include "pdim/nibble.hpp"
#include "pdim/audit.hpp"
#include "pdim/hypergraph.hpp"
#include "pdim/coloring.hpp"
#include "pdim/trajectory.hpp"
#include "pdim/prague.hpp"
#include "pdim/experiment.hpp"
