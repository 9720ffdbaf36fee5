#pragma once

#include "rgraph/edge_matrix.hpp"
#include "rgraph/equivalence.hpp"
#include "rgraph/error.hpp"
#include "rgraph/graph.hpp"
#include "rgraph/io.hpp"
#include "rgraph/node_set.hpp"
#include "rgraph/oracle.hpp"
#include "rgraph/separation.hpp"
#include "rgraph/transform.hpp"
