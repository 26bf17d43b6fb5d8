#include "rarehit/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>

#define RAREHIT_AVX2 __attribute__((target("avx2")))

namespace rarehit::kernels::avx2 {

bool supported() noexcept {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
}

RAREHIT_AVX2 void spmv(const SlicedEll& m, std::span<const double> in, std::span<double> out) {
    constexpr std::size_t kSlice = SlicedEll::kSlice;
    const std::size_t slices = m.slice_width.size();
    const double* x = in.data();
    for (std::size_t s = 0; s < slices; ++s) {
        const std::size_t base = m.slice_ptr[s];
        const std::size_t width = m.slice_width[s];
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < width; ++j) {
            const std::size_t at = base + j * kSlice;
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(m.col.data() + at));
            const __m256d v = _mm256_loadu_pd(m.val.data() + at);
            const __m256d g = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(v, g));
        }
        const std::size_t row0 = s * kSlice;
        if (row0 + kSlice <= m.rows) {
            _mm256_storeu_pd(out.data() + row0, acc);
        } else {
            alignas(32) double tmp[kSlice];
            _mm256_store_pd(tmp, acc);
            std::copy(tmp, tmp + (m.rows - row0), out.data() + row0);
        }
    }
}

RAREHIT_AVX2 double sum(std::span<const double> x) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t full = x.size() & ~std::size_t{3};
    for (std::size_t i = 0; i < full; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (std::size_t i = full; i < x.size(); ++i) lane[i - full] += x[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

RAREHIT_AVX2 double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d best = _mm256_setzero_pd();
    const std::size_t full = n & ~std::size_t{3};
    for (std::size_t i = 0; i < full; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        best = _mm256_max_pd(best, _mm256_andnot_pd(sign, d));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, best);
    double result = std::max(std::max(lane[0], lane[1]), std::max(lane[2], lane[3]));
    for (std::size_t i = full; i < n; ++i) {
        const double d = a[i] - b[i];
        result = std::max(result, d < 0.0 ? -d : d);
    }
    return result;
}

}  // namespace rarehit::kernels::avx2

#endif
