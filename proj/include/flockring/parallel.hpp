#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace flockring {

/// Worker cap: FLOCKRING_THREADS when set (minimum 1), else the hardware
/// concurrency.
int worker_count();

/// Evaluates f(0..n-1) across workers, gathering results in index order so
/// callers see the same output regardless of scheduling.
std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& f);

} // namespace flockring
