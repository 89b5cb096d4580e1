#include "bubblelab/core/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bubblelab {

void parallel_for(std::size_t n_tasks, unsigned n_workers,
                  const std::function<void(std::size_t)>& task) {
    if (n_tasks == 0) return;
    if (n_workers <= 1 || n_tasks == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) task(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_tasks) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const unsigned spawn = static_cast<unsigned>(
        std::min<std::size_t>(n_tasks, static_cast<std::size_t>(n_workers)));
    std::vector<std::thread> threads;
    threads.reserve(spawn);
    for (unsigned w = 0; w < spawn; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bubblelab
