#pragma once

#include <cstddef>
#include <functional>

namespace histlayer {

// Number of worker threads used by the pixel loops. 1 means everything runs
// on the calling thread, which is the bit-reproducible mode.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Splits [0, n) into thread_count() contiguous chunks and runs
// fn(chunk_index, begin, end) for each. Chunk boundaries depend only on n and
// the thread count, so per-chunk partial results can be reduced in a fixed
// order.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Number of chunks parallel_chunks will use for a range of size n.
std::size_t chunk_count(std::size_t n);

}  // namespace histlayer
