// Copyright (c) 2026 The dfrelay Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace dfrelay {

/// dBW -> W.
inline double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

/// W -> dBW. Caller guarantees watts > 0.
inline double watts_to_dbw(double watts) { return 10.0 * std::log10(watts); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace dfrelay
