#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference and, where
// the target supports it, an AVX2 variant that performs the same floating
// point operations in the same order (no FMA contraction), so results are
// bit-identical across variants. The variant is picked once at runtime.

#include <cstddef>
#include <span>
#include <string_view>

namespace spagg::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Best variant supported by this CPU and build. SPAGG_ISA=scalar in the
// environment forces the reference path.
Isa active_isa();
bool isa_available(Isa isa);

enum class DistanceKind { euclidean, manhattan, chebyshev };

// Distances from `query` (dim coordinates) to each of the n points stored
// point-major in `points` (n * dim values).
void distances(DistanceKind kind, std::span<const double> query, std::span<const double> points,
               std::size_t dim, std::span<double> out, Isa isa = active_isa());

// Single-pair distance, same arithmetic as the scalar `distances` path.
double distance(DistanceKind kind, std::span<const double> a, std::span<const double> b);

struct ImageView {
  std::span<const double> data;
  std::size_t width;
  std::size_t height;
};

// out(r, c) = sum_{i, j} mask(i, j) * in(clamp(r + i - a), clamp(c + j - b)),
// with (a, b) the mask centre and i outer, j inner. Mask dimensions must be
// odd; `out` must hold width * height values.
void correlate_clamped(ImageView in, ImageView mask, std::span<double> out, Isa isa = active_isa());

namespace scalar {
void distances(DistanceKind kind, std::span<const double> query, std::span<const double> points,
               std::size_t dim, std::span<double> out);
void correlate_clamped(ImageView in, ImageView mask, std::span<double> out);
}  // namespace scalar

namespace avx2 {
bool compiled();
void distances(DistanceKind kind, std::span<const double> query, std::span<const double> points,
               std::size_t dim, std::span<double> out);
void correlate_clamped(ImageView in, ImageView mask, std::span<double> out);
}  // namespace avx2

}  // namespace spagg::kernels
