#pragma once

#include <functional>

namespace stegcost {

/// Maps a requested worker count to an actual one: values < 1 mean "auto"
/// (hardware concurrency, at least 1).
int resolve_threads(int requested) noexcept;

/// Runs fn(begin, end) over disjoint contiguous chunks of [0, count) on up to
/// `threads` workers. Chunk boundaries depend only on (count, threads), and
/// callers write disjoint output slots, so results never depend on scheduling.
void parallel_chunks(int count, int threads, const std::function<void(int, int)>& fn);

}  // namespace stegcost
