#include "lattice_fe2/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace latfe2
{
	int default_worker_count()
	{
		if (const char *env = std::getenv("LATFE2_WORKERS"))
		{
			try
			{
				const int n = std::stoi(env);
				if (n > 0)
					return n;
			}
			catch (const std::exception &)
			{
			}
		}
		return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
	}

	void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)> &body)
	{
		const std::size_t nt = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
		if (nt <= 1)
		{
			for (std::size_t i = 0; i < n; ++i)
				body(i);
			return;
		}

		std::vector<std::exception_ptr> errors(nt);
		std::vector<std::thread> pool;
		pool.reserve(nt);
		const std::size_t chunk = (n + nt - 1) / nt;
		for (std::size_t t = 0; t < nt; ++t)
		{
			pool.emplace_back([&, t] {
				const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
				for (std::size_t i = lo; i < hi; ++i)
				{
					try
					{
						body(i);
					}
					catch (...)
					{
						errors[t] = std::current_exception();
						return;
					}
				}
			});
		}
		for (auto &th : pool)
			th.join();
		for (std::size_t t = 0; t < nt; ++t)
			if (errors[t])
				std::rethrow_exception(errors[t]);
	}
} // namespace latfe2
