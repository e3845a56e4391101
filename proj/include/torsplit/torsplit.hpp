#pragma once

// Umbrella header for the whole library.

#include "torsplit/config.hpp"
#include "torsplit/diagnostics.hpp"
#include "torsplit/errors.hpp"
#include "torsplit/fft.hpp"
#include "torsplit/grid.hpp"
#include "torsplit/operators.hpp"
#include "torsplit/presets.hpp"
#include "torsplit/reports.hpp"
#include "torsplit/runner.hpp"
#include "torsplit/snapshot.hpp"
#include "torsplit/spectral.hpp"
#include "torsplit/splitting.hpp"
#include "torsplit/subflows.hpp"
