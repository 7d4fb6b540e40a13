#pragma once

#include <cstddef>

namespace explore {

/// Serial runs are the reference; parallel runs must reproduce them exactly.
enum class ExecutionPolicy { Serial, Parallel };

/// Number of OpenMP workers used by parallel kernels (0 = runtime default).
void set_worker_count(int workers);
int worker_count();

}  // namespace explore
