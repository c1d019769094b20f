#pragma once

#include "fragclass/basis.hpp"
#include "fragclass/classifier.hpp"
#include "fragclass/config.hpp"
#include "fragclass/curve.hpp"
#include "fragclass/datagen.hpp"
#include "fragclass/dataset_io.hpp"
#include "fragclass/experiment.hpp"
#include "fragclass/filtering.hpp"
#include "fragclass/grid.hpp"
#include "fragclass/kernel.hpp"
#include "fragclass/model_io.hpp"
#include "fragclass/pattern.hpp"
#include "fragclass/quadrature.hpp"
#include "fragclass/rng.hpp"
#include "fragclass/selection.hpp"
#include "fragclass/toy.hpp"
