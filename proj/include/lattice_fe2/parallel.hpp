#pragma once

#include <cstddef>
#include <functional>

namespace latfe2
{
	/// Worker count from LATFE2_WORKERS, else the hardware concurrency (at least 1).
	int default_worker_count();

	/// Runs body(i) for i in [0, n) on up to `workers` threads in contiguous chunks.
	/// The exception from the lowest failing index is rethrown after all threads joined.
	void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)> &body);
} // namespace latfe2
