#include "stegcost/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace stegcost {

int resolve_threads(int requested) noexcept {
    if (requested >= 1) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(int count, int threads, const std::function<void(int, int)>& fn) {
    if (count <= 0) return;
    threads = std::min(resolve_threads(threads), count);
    if (threads <= 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    int base = count / threads;
    int extra = count % threads;
    int begin = 0;
    for (int t = 0; t < threads; ++t) {
        int len = base + (t < extra ? 1 : 0);
        int end = begin + len;
        workers.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
    for (auto& w : workers) w.join();
}

}  // namespace stegcost
