#pragma once

#include "fsdr/error.hpp"
#include "fsdr/types.hpp"
#include "fsdr/rng.hpp"
#include "fsdr/parallel.hpp"
#include "fsdr/linalg.hpp"
#include "fsdr/metrics.hpp"
#include "fsdr/wire.hpp"
#include "fsdr/ladle.hpp"
#include "fsdr/kwire.hpp"
#include "fsdr/evalmetrics.hpp"
#include "fsdr/simgen.hpp"
#include "fsdr/experiment.hpp"
#include "fsdr/dataio.hpp"
