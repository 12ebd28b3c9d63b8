#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace entbench {

using Rng = std::mt19937_64;

// Independent stream for work unit `index` under a master seed. Monte-Carlo
// loops are cut into fixed-size chunks, each drawing from its own stream, so
// results do not depend on how chunks are scheduled across threads.
Rng stream_rng(std::uint64_t seed, std::uint64_t index);

inline constexpr std::size_t kChunkSize = 4096;

std::size_t chunk_count(std::size_t total, std::size_t chunk = kChunkSize);

// Runs fn(chunk_index, begin, end) for every chunk. Chunks may run
// concurrently; the caller reduces per-chunk results in index order.
void for_each_chunk(std::size_t total, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                    std::size_t chunk = kChunkSize);

// Worker count used by for_each_chunk; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

}  // namespace entbench
