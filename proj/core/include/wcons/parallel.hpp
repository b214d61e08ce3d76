#pragma once

#include <cstddef>
#include <functional>

namespace wcons {

/// Worker count: `requested` if nonzero, else WCONS_THREADS if set and
/// nonzero, else hardware concurrency. Always at least 1.
unsigned resolve_threads(unsigned requested = 0);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Tasks must
/// write only to slots owned by their index. If any task throws, the
/// exception of the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace wcons
