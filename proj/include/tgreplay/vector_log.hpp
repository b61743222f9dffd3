#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#if defined(TGREPLAY_HAVE_LIBMVEC) && defined(__x86_64__) && defined(__GNUC__)
#include <immintrin.h>
#define TGREPLAY_VECTOR_LOG 1
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wpsabi"
// glibc libmvec variants of log.
extern "C" __m256d _ZGVdN4v_log(__m256d);
extern "C" __m512d _ZGVeN8v_log(__m512d);
#pragma GCC diagnostic pop
#endif

namespace tgreplay::detail {

/// Scalar reference: out[i] = floor(clamp(log(1 + a u[i]) * scale, 0, last)).
inline void log_affine_floor_scalar(const double* u, std::size_t* out, std::size_t n, double a, double scale,
                                    double last) {
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::log(1.0 + u[i] * a) * scale;
    x = x > 0.0 ? x : 0.0;
    x = x < last ? x : last;
    out[i] = static_cast<std::size_t>(static_cast<std::int64_t>(x));
  }
}

#ifdef TGREPLAY_VECTOR_LOG
// floor(x) + 2^52 carries the integer in its low mantissa bits for
// 0 <= x < 2^52, so no float-to-int64 instruction is needed.
constexpr double kMagic = 0x1.0p52;

__attribute__((target("avx2,fma"))) inline void log_affine_floor_avx2(const double* u, std::size_t* out,
                                                                       std::size_t n, double a, double scale,
                                                                       double last) {
  const __m256d one = _mm256_set1_pd(1.0), va = _mm256_set1_pd(a), vs = _mm256_set1_pd(scale);
  const __m256d lo = _mm256_setzero_pd(), hi = _mm256_set1_pd(last), magic = _mm256_set1_pd(kMagic);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_mul_pd(_ZGVdN4v_log(_mm256_fmadd_pd(_mm256_loadu_pd(u + i), va, one)), vs);
    x = _mm256_floor_pd(_mm256_min_pd(_mm256_max_pd(x, lo), hi));
    __m256i bits = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(x, magic)), _mm256_castpd_si256(magic));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), bits);
  }
  log_affine_floor_scalar(u + i, out + i, n - i, a, scale, last);
}

__attribute__((target("avx512f"))) inline void log_affine_floor_avx512(const double* u, std::size_t* out,
                                                                        std::size_t n, double a, double scale,
                                                                        double last) {
  const __m512d one = _mm512_set1_pd(1.0), va = _mm512_set1_pd(a), vs = _mm512_set1_pd(scale);
  const __m512d lo = _mm512_setzero_pd(), hi = _mm512_set1_pd(last), magic = _mm512_set1_pd(kMagic);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m512d x = _mm512_mul_pd(_ZGVeN8v_log(_mm512_fmadd_pd(_mm512_loadu_pd(u + i), va, one)), vs);
    x = _mm512_roundscale_pd(_mm512_min_pd(_mm512_max_pd(x, lo), hi), _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
    __m512i bits = _mm512_sub_epi64(_mm512_castpd_si512(_mm512_add_pd(x, magic)), _mm512_castpd_si512(magic));
    _mm512_storeu_si512(out + i, bits);
  }
  log_affine_floor_scalar(u + i, out + i, n - i, a, scale, last);
}
#endif

enum class VectorIsa { Scalar, Avx2, Avx512 };

inline VectorIsa vector_isa() {
#ifdef TGREPLAY_VECTOR_LOG
  static const VectorIsa isa = [] {
    if (__builtin_cpu_supports("avx512f")) return VectorIsa::Avx512;
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return VectorIsa::Avx2;
    return VectorIsa::Scalar;
  }();
  return isa;
#else
  return VectorIsa::Scalar;
#endif
}

/// out[i] = floor(clamp(log(1 + a u[i]) * scale, 0, last)); last < 2^52.
inline void log_affine_floor(const double* u, std::size_t* out, std::size_t n, double a, double scale, double last) {
#ifdef TGREPLAY_VECTOR_LOG
  switch (vector_isa()) {
    case VectorIsa::Avx512: return log_affine_floor_avx512(u, out, n, a, scale, last);
    case VectorIsa::Avx2: return log_affine_floor_avx2(u, out, n, a, scale, last);
    case VectorIsa::Scalar: break;
  }
#endif
  log_affine_floor_scalar(u, out, n, a, scale, last);
}

}  // namespace tgreplay::detail
