#pragma once

#include "bumplab/compactness.hpp"
#include "bumplab/error.hpp"
#include "bumplab/function_spec.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/operators.hpp"
#include "bumplab/orlicz.hpp"
#include "bumplab/spectral.hpp"
#include "bumplab/weights.hpp"
