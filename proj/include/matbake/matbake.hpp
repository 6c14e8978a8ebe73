// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file matbake.hpp
/// Umbrella header.

#pragma once

#include "matbake/bake.hpp"
#include "matbake/commands.hpp"
#include "matbake/error.hpp"
#include "matbake/fixtures.hpp"
#include "matbake/geometry.hpp"
#include "matbake/heightfield.hpp"
#include "matbake/image.hpp"
#include "matbake/io.hpp"
#include "matbake/material.hpp"
#include "matbake/metrics.hpp"
#include "matbake/parallel.hpp"
#include "matbake/raster.hpp"
#include "matbake/shade.hpp"
#include "matbake/vec.hpp"
