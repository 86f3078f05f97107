#pragma once

// Everything except render.hpp, which needs libpng.

#include "specklemap/calibration.hpp"
#include "specklemap/core.hpp"
#include "specklemap/corpus.hpp"
#include "specklemap/filters.hpp"
#include "specklemap/io.hpp"
#include "specklemap/kernels.hpp"
#include "specklemap/metrics.hpp"
#include "specklemap/pipeline.hpp"
#include "specklemap/reprojection.hpp"
#include "specklemap/segmentation.hpp"
#include "specklemap/synth.hpp"
#include "specklemap/tracker.hpp"
