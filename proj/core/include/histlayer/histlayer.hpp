#pragma once

#include "histlayer/binning.hpp"
#include "histlayer/colorspace.hpp"
#include "histlayer/errors.hpp"
#include "histlayer/gradcheck.hpp"
#include "histlayer/grid.hpp"
#include "histlayer/histogram.hpp"
#include "histlayer/histogram_io.hpp"
#include "histlayer/joint.hpp"
#include "histlayer/metrics.hpp"
#include "histlayer/optim.hpp"
#include "histlayer/parallel.hpp"
#include "histlayer/png_io.hpp"
