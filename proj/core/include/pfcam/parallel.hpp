// Copyright 2026 The pfcam Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

namespace pfcam {

/// Worker count used by the per-row loops. 0 (the default) means
/// std::thread::hardware_concurrency().
void set_thread_count(unsigned n);
[[nodiscard]] unsigned thread_count();

/// Runs body(row) for every row in [0, rows), splitting contiguous row blocks
/// across worker threads. Rows must be independent. Exceptions thrown by the
/// body are rethrown on the calling thread after all workers finish.
void parallel_rows(int rows, const std::function<void(int)>& body);

}  // namespace pfcam
