#pragma once

#include <cstddef>
#include <vector>

#ifdef MVFBSDE_HAVE_OPENMP
#include <omp.h>
#endif

namespace mvfbsde {

// Fixed chunk size so reduction order never depends on the thread count.
inline constexpr std::size_t kChunk = 4096;

inline std::size_t num_chunks(std::size_t n) { return (n + kChunk - 1) / kChunk; }

// Runs body(begin, end, chunk_index) over [0, n) in chunks of kChunk.
// Chunks may execute on any thread; anything order-sensitive must be
// indexed by chunk and combined sequentially afterwards.
template <typename Body>
void parallel_chunks(std::size_t n, Body&& body) {
  const std::size_t nc = num_chunks(n);
#ifdef MVFBSDE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
  for (long long c = 0; c < static_cast<long long>(nc); ++c) {
    const std::size_t b = static_cast<std::size_t>(c) * kChunk;
    const std::size_t e = b + kChunk < n ? b + kChunk : n;
    body(b, e, static_cast<std::size_t>(c));
  }
#else
  for (std::size_t c = 0; c < nc; ++c) {
    const std::size_t b = c * kChunk;
    const std::size_t e = b + kChunk < n ? b + kChunk : n;
    body(b, e, c);
  }
#endif
}

// Deterministic parallel sum: per-chunk partials combined in index order.
template <typename Term>
double chunked_sum(std::size_t n, Term&& term) {
  std::vector<double> partials(num_chunks(n), 0.0);
  parallel_chunks(n, [&](std::size_t b, std::size_t e, std::size_t c) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += term(i);
    partials[c] = s;
  });
  double total = 0.0;
  for (double p : partials) total += p;
  return total;
}

// As chunked_sum but accumulating a small fixed-width vector of sums.
template <typename Term>
void chunked_sum_vec(std::size_t n, std::size_t width, double* out, Term&& term) {
  std::vector<double> partials(num_chunks(n) * width, 0.0);
  parallel_chunks(n, [&](std::size_t b, std::size_t e, std::size_t c) {
    double* p = partials.data() + c * width;
    for (std::size_t i = b; i < e; ++i) term(i, p);
  });
  for (std::size_t w = 0; w < width; ++w) out[w] = 0.0;
  for (std::size_t c = 0; c < num_chunks(n); ++c)
    for (std::size_t w = 0; w < width; ++w) out[w] += partials[c * width + w];
}

inline int worker_threads() {
#ifdef MVFBSDE_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_worker_threads(int n) {
#ifdef MVFBSDE_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace mvfbsde
