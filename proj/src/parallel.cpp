#include "hvp/common/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace hvp {

unsigned hardwareThreads()
{
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

void parallelFor(unsigned threads, size_t count,
                 const std::function<void(size_t)>& fn)
{
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; i++)
            fn(i);
        return;
    }
    if (threads > count)
        threads = static_cast<unsigned>(count);

    std::atomic<size_t> next{0};
    auto drain = [&] {
        for (;;) {
            size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count)
                break;
            fn(i);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (unsigned t = 0; t + 1 < threads; t++)
        pool.emplace_back(drain);
    drain();
    for (auto& th : pool)
        th.join();
}

}  // namespace hvp
