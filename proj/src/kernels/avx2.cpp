// Built with -mavx2 (and without -mfma) on x86-64; elsewhere this file only
// provides stubs reporting that the variant is unavailable.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "spagg/kernels/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace spagg::kernels::avx2 {

#if defined(__AVX2__)

bool compiled() { return true; }

void distances(DistanceKind kind, std::span<const double> query, std::span<const double> points,
               std::size_t dim, std::span<double> out) {
  const std::size_t n = out.size();
  const auto stride = static_cast<long long>(dim);
  const __m256i index = _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const double* base = points.data() + p * dim;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      const __m256d q = _mm256_set1_pd(query[k]);
      const __m256d v = _mm256_i64gather_pd(base + k, index, 8);
      const __m256d t = _mm256_sub_pd(q, v);
      switch (kind) {
        case DistanceKind::euclidean:
          acc = _mm256_add_pd(acc, _mm256_mul_pd(t, t));
          break;
        case DistanceKind::manhattan:
          acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, t));
          break;
        case DistanceKind::chebyshev:
          acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign_mask, t));
          break;
      }
    }
    if (kind == DistanceKind::euclidean) acc = _mm256_sqrt_pd(acc);
    _mm256_storeu_pd(out.data() + p, acc);
  }
  if (p < n) {
    scalar::distances(kind, query, points.subspan(p * dim), dim, out.subspan(p));
  }
}

namespace {

double correlate_one(ImageView in, ImageView mask, std::ptrdiff_t r, std::ptrdiff_t c) {
  const auto w = static_cast<std::ptrdiff_t>(in.width);
  const auto h = static_cast<std::ptrdiff_t>(in.height);
  const auto mw = static_cast<std::ptrdiff_t>(mask.width);
  const auto mh = static_cast<std::ptrdiff_t>(mask.height);
  const std::ptrdiff_t a = mh / 2;
  const std::ptrdiff_t b = mw / 2;
  double acc = 0.0;
  for (std::ptrdiff_t i = 0; i < mh; ++i) {
    const std::ptrdiff_t rr = std::clamp(r + i - a, std::ptrdiff_t{0}, h - 1);
    for (std::ptrdiff_t j = 0; j < mw; ++j) {
      const std::ptrdiff_t cc = std::clamp(c + j - b, std::ptrdiff_t{0}, w - 1);
      acc += mask.data[i * mw + j] * in.data[rr * w + cc];
    }
  }
  return acc;
}

}  // namespace

void correlate_clamped(ImageView in, ImageView mask, std::span<double> out) {
  const auto w = static_cast<std::ptrdiff_t>(in.width);
  const auto h = static_cast<std::ptrdiff_t>(in.height);
  const auto mw = static_cast<std::ptrdiff_t>(mask.width);
  const auto mh = static_cast<std::ptrdiff_t>(mask.height);
  const std::ptrdiff_t a = mh / 2;
  const std::ptrdiff_t b = mw / 2;
  // Columns [b, w - b) never need horizontal clamping.
  const std::ptrdiff_t lo = std::min(b, w);
  const std::ptrdiff_t hi = std::max(lo, w - b);
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < lo; ++c) out[r * w + c] = correlate_one(in, mask, r, c);
    std::ptrdiff_t c = lo;
    for (; c + 4 <= hi; c += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::ptrdiff_t i = 0; i < mh; ++i) {
        const std::ptrdiff_t rr = std::clamp(r + i - a, std::ptrdiff_t{0}, h - 1);
        const double* row = in.data.data() + rr * w + c - b;
        for (std::ptrdiff_t j = 0; j < mw; ++j) {
          const __m256d m = _mm256_set1_pd(mask.data[i * mw + j]);
          acc = _mm256_add_pd(acc, _mm256_mul_pd(m, _mm256_loadu_pd(row + j)));
        }
      }
      _mm256_storeu_pd(out.data() + r * w + c, acc);
    }
    for (; c < w; ++c) out[r * w + c] = correlate_one(in, mask, r, c);
  }
}

#else

bool compiled() { return false; }

void distances(DistanceKind kind, std::span<const double> query, std::span<const double> points,
               std::size_t dim, std::span<double> out) {
  scalar::distances(kind, query, points, dim, out);
}

void correlate_clamped(ImageView in, ImageView mask, std::span<double> out) {
  scalar::correlate_clamped(in, mask, out);
}

#endif

}  // namespace spagg::kernels::avx2
