#pragma once

// Umbrella header for the granular-ball toolkit.

#include "gbtk/cluster.hpp"
#include "gbtk/core.hpp"
#include "gbtk/data.hpp"
#include "gbtk/experiments.hpp"
#include "gbtk/gbknn.hpp"
#include "gbtk/gbsvm.hpp"
#include "gbtk/json_io.hpp"
#include "gbtk/optimize.hpp"
#include "gbtk/roughset.hpp"
#include "gbtk/split.hpp"
