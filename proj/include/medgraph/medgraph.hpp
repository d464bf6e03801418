#pragma once

#include "medgraph/distance_oracle.hpp"
#include "medgraph/eccentricities.hpp"
#include "medgraph/graph.hpp"
#include "medgraph/theta.hpp"
