#pragma once

// Umbrella header for the nonconvex total-variation toolkit.

#include "tvphi/csv.hpp"
#include "tvphi/demos.hpp"
#include "tvphi/energy.hpp"
#include "tvphi/image.hpp"
#include "tvphi/metrics.hpp"
#include "tvphi/multiscale.hpp"
#include "tvphi/phi.hpp"
#include "tvphi/solver.hpp"
#include "tvphi/stats.hpp"
