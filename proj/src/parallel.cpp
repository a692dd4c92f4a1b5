#include "flockring/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace flockring {

int worker_count() {
    if (const char* env = std::getenv("FLOCKRING_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& f) {
    std::vector<double> out(n);
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                out[i] = f(i);
            }
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

} // namespace flockring
