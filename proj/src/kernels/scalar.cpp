#include <algorithm>
#include <cmath>

#include "spagg/kernels/kernels.hpp"

namespace spagg::kernels::scalar {

void distances(DistanceKind kind, std::span<const double> query, std::span<const double> points,
               std::size_t dim, std::span<double> out) {
  const std::size_t n = out.size();
  for (std::size_t p = 0; p < n; ++p) {
    const double* pt = points.data() + p * dim;
    double acc = 0.0;
    switch (kind) {
      case DistanceKind::euclidean:
        for (std::size_t k = 0; k < dim; ++k) {
          const double t = query[k] - pt[k];
          acc += t * t;
        }
        acc = std::sqrt(acc);
        break;
      case DistanceKind::manhattan:
        for (std::size_t k = 0; k < dim; ++k) acc += std::fabs(query[k] - pt[k]);
        break;
      case DistanceKind::chebyshev:
        for (std::size_t k = 0; k < dim; ++k) acc = std::max(acc, std::fabs(query[k] - pt[k]));
        break;
    }
    out[p] = acc;
  }
}

void correlate_clamped(ImageView in, ImageView mask, std::span<double> out) {
  const auto w = static_cast<std::ptrdiff_t>(in.width);
  const auto h = static_cast<std::ptrdiff_t>(in.height);
  const auto mw = static_cast<std::ptrdiff_t>(mask.width);
  const auto mh = static_cast<std::ptrdiff_t>(mask.height);
  const std::ptrdiff_t a = mh / 2;
  const std::ptrdiff_t b = mw / 2;
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t i = 0; i < mh; ++i) {
        const std::ptrdiff_t rr = std::clamp(r + i - a, std::ptrdiff_t{0}, h - 1);
        for (std::ptrdiff_t j = 0; j < mw; ++j) {
          const std::ptrdiff_t cc = std::clamp(c + j - b, std::ptrdiff_t{0}, w - 1);
          acc += mask.data[i * mw + j] * in.data[rr * w + cc];
        }
      }
      out[r * w + c] = acc;
    }
  }
}

}  // namespace spagg::kernels::scalar
