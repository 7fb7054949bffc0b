#ifndef HVP_COMMON_PARALLEL_HPP
#define HVP_COMMON_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace hvp {

// Runs fn(0..count-1) across up to `threads` OS threads (the caller
// participates). Results must not depend on the interleaving; callers pass
// pure per-index work. threads <= 1 runs inline.
void parallelFor(unsigned threads, size_t count,
                 const std::function<void(size_t)>& fn);

unsigned hardwareThreads();

}  // namespace hvp

#endif
