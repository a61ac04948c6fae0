#pragma once

#include <cstddef>
#include <functional>

namespace l1qr {

// Environment variable holding the default worker count.
inline constexpr const char* kThreadsEnvVar = "L1QR_NUM_THREADS";

// Worker count from L1QR_NUM_THREADS, else the hardware concurrency (>= 1).
std::size_t default_thread_count();

// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
// Tasks are claimed dynamically; callers must write results by index so the
// outcome does not depend on scheduling. The first exception thrown by a task
// is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace l1qr
