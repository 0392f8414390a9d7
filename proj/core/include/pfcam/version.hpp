// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace pfcam {
inline constexpr const char* kVersion = "0.1.0";
}
