#pragma once

// Umbrella header for the whole library.

#include "homf/config.hpp"
#include "homf/dataset.hpp"
#include "homf/dense.hpp"
#include "homf/embedding_io.hpp"
#include "homf/experiment.hpp"
#include "homf/factorize.hpp"
#include "homf/graph.hpp"
#include "homf/metrics.hpp"
#include "homf/parallel.hpp"
#include "homf/rng.hpp"
#include "homf/sparse.hpp"
#include "homf/synthetic.hpp"
#include "homf/walk.hpp"
