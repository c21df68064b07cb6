#pragma once

// Umbrella header for the library (without the HTTP binding).

#include "mcuq/extractor.hpp"
#include "mcuq/features.hpp"
#include "mcuq/interpolants.hpp"
#include "mcuq/mesh.hpp"
#include "mcuq/mesh_io.hpp"
#include "mcuq/metrics.hpp"
#include "mcuq/raw_io.hpp"
#include "mcuq/report.hpp"
#include "mcuq/uncertainty.hpp"
#include "mcuq/volume.hpp"
