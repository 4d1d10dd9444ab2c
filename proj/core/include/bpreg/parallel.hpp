#pragma once

#include <cstddef>
#include <functional>

namespace bpreg {

// 0 means one worker per hardware thread.
unsigned resolve_threads(unsigned requested);

// Worker cap from the BPREG_THREADS environment variable (0 when unset or
// unparsable, i.e. automatic).
unsigned threads_from_env();

// Runs body(i) for i in [0, count) on up to `threads` workers. Indices are
// handed out in contiguous blocks, so results written by index do not depend
// on scheduling. The exception from the lowest failing index is rethrown
// after all workers finish.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace bpreg
