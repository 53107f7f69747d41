#include "fba/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace fba {

namespace {
std::atomic<int> g_threads{0};  // 0 = unset, use hardware concurrency
}

int thread_count() {
    int n = g_threads.load();
    if (n > 0) return n;
    n = static_cast<int>(std::thread::hardware_concurrency());
    return n > 0 ? n : 1;
}

void set_thread_count(int n) { g_threads.store(n > 0 ? n : 0); }

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& fn) {
    const std::int64_t count = end - begin;
    if (count <= 0) return;
    const int workers = static_cast<int>(
        std::min<std::int64_t>(thread_count(), count));
    if (workers <= 1) {
        for (std::int64_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = begin + count * w / workers;
        const std::int64_t hi = begin + count * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::int64_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
}

}  // namespace fba
