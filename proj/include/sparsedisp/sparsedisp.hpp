#pragma once

#include "sparsedisp/boundary.hpp"
#include "sparsedisp/colorspace.hpp"
#include "sparsedisp/config.hpp"
#include "sparsedisp/eval.hpp"
#include "sparsedisp/grid.hpp"
#include "sparsedisp/imageio.hpp"
#include "sparsedisp/matching.hpp"
#include "sparsedisp/pipeline.hpp"
#include "sparsedisp/reconstruct.hpp"
#include "sparsedisp/report.hpp"
#include "sparsedisp/segmentation.hpp"
