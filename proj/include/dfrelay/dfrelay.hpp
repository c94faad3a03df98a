// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dfrelay/channel.hpp"
#include "dfrelay/dualsolver.hpp"
#include "dfrelay/experiment.hpp"
#include "dfrelay/highpower.hpp"
#include "dfrelay/random.hpp"
#include "dfrelay/ratefn.hpp"
#include "dfrelay/reference.hpp"
#include "dfrelay/units.hpp"
#include "dfrelay/waterfill.hpp"
