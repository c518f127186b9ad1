#pragma once

#include "acquisition.hpp"
#include "cartography.hpp"
#include "datagen.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "model.hpp"
#include "pca.hpp"
#include "reporting.hpp"
#include "rng.hpp"
#include "svg.hpp"
