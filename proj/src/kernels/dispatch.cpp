#include <cmath>
#include <cstdlib>
#include <string>

#include "spagg/errors.hpp"
#include "spagg/kernels/kernels.hpp"

namespace spagg::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
      return avx2::compiled() && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() {
  if (const char* forced = std::getenv("SPAGG_ISA"); forced != nullptr && std::string(forced) == "scalar") {
    return Isa::scalar;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

void check_isa(Isa isa) {
  if (!isa_available(isa)) throw ArgumentError("kernel variant not available: " + std::string(isa_name(isa)));
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

void distances(DistanceKind kind, std::span<const double> query, std::span<const double> points,
               std::size_t dim, std::span<double> out, Isa isa) {
  if (points.size() < out.size() * dim || query.size() < dim) throw ArgumentError("distances: size mismatch");
  check_isa(isa);
  if (isa == Isa::avx2) {
    avx2::distances(kind, query, points, dim, out);
  } else {
    scalar::distances(kind, query, points, dim, out);
  }
}

double distance(DistanceKind kind, std::span<const double> a, std::span<const double> b) {
  double out = 0.0;
  scalar::distances(kind, a, b, a.size(), std::span<double>(&out, 1));
  return out;
}

void correlate_clamped(ImageView in, ImageView mask, std::span<double> out, Isa isa) {
  if (mask.width % 2 == 0 || mask.height % 2 == 0) throw ArgumentError("mask dimensions must be odd");
  if (in.data.size() != in.width * in.height || mask.data.size() != mask.width * mask.height ||
      out.size() != in.width * in.height) {
    throw ArgumentError("correlate_clamped: size mismatch");
  }
  check_isa(isa);
  if (isa == Isa::avx2) {
    avx2::correlate_clamped(in, mask, out);
  } else {
    scalar::correlate_clamped(in, mask, out);
  }
}

}  // namespace spagg::kernels
