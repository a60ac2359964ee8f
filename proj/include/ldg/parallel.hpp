// Chunked data-parallel loops and reproducible reductions.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ldg {

enum class Reduction { Deterministic, Fast };

// LDG_THREADS if set, else the hardware concurrency.
int worker_count();

// Runs body(begin, end, chunk_index) over fixed-size chunks of [0, n).
// Chunk boundaries depend only on n and chunk, never on the worker count.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

std::size_t chunk_count(std::size_t n, std::size_t chunk);

// Pairwise tree sum in index order.
double pairwise_sum(const double* v, std::size_t n);

// Sum of body(begin, end) over chunks. Deterministic mode combines per-chunk
// partials with a fixed tree; fast mode lets each worker accumulate in
// arrival order.
double parallel_sum(std::size_t n, std::size_t chunk, Reduction mode,
                    const std::function<double(std::size_t, std::size_t)>& body);

double parallel_dot(const std::vector<double>& a, const std::vector<double>& b, Reduction mode);

}  // namespace ldg
