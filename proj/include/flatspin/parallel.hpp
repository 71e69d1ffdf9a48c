#pragma once

#include <functional>

namespace flatspin {

/// Worker count: hardware concurrency capped by FLATSPIN_THREADS when set (minimum 1).
int thread_count();

/// Cap set through the API; overrides FLATSPIN_THREADS. 0 clears it.
void set_thread_cap(int n);

/// Runs body(i) for i in [0, n) over contiguous chunks; body must only touch index-local state.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace flatspin
