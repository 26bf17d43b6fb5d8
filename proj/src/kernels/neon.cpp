#include "rarehit/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>

namespace rarehit::kernels::neon {

// Two float64x2 registers stand in for one four-lane accumulator so the
// association order matches the scalar reference.

void spmv(const SlicedEll& m, std::span<const double> in, std::span<double> out) {
    constexpr std::size_t kSlice = SlicedEll::kSlice;
    const std::size_t slices = m.slice_width.size();
    for (std::size_t s = 0; s < slices; ++s) {
        const std::size_t base = m.slice_ptr[s];
        const std::size_t width = m.slice_width[s];
        float64x2_t lo = vdupq_n_f64(0.0);
        float64x2_t hi = vdupq_n_f64(0.0);
        for (std::size_t j = 0; j < width; ++j) {
            const std::size_t at = base + j * kSlice;
            const std::int32_t* c = m.col.data() + at;
            const double glo[2] = {in[static_cast<std::size_t>(c[0])], in[static_cast<std::size_t>(c[1])]};
            const double ghi[2] = {in[static_cast<std::size_t>(c[2])], in[static_cast<std::size_t>(c[3])]};
            lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(m.val.data() + at), vld1q_f64(glo)));
            hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(m.val.data() + at + 2), vld1q_f64(ghi)));
        }
        double tmp[kSlice];
        vst1q_f64(tmp, lo);
        vst1q_f64(tmp + 2, hi);
        const std::size_t row0 = s * kSlice;
        std::copy(tmp, tmp + std::min(kSlice, m.rows - row0), out.data() + row0);
    }
}

double sum(std::span<const double> x) {
    float64x2_t lo = vdupq_n_f64(0.0);
    float64x2_t hi = vdupq_n_f64(0.0);
    const std::size_t full = x.size() & ~std::size_t{3};
    for (std::size_t i = 0; i < full; i += 4) {
        lo = vaddq_f64(lo, vld1q_f64(x.data() + i));
        hi = vaddq_f64(hi, vld1q_f64(x.data() + i + 2));
    }
    double lane[4];
    vst1q_f64(lane, lo);
    vst1q_f64(lane + 2, hi);
    for (std::size_t i = full; i < x.size(); ++i) lane[i - full] += x[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    float64x2_t best = vdupq_n_f64(0.0);
    const std::size_t full = n & ~std::size_t{1};
    for (std::size_t i = 0; i < full; i += 2)
        best = vmaxq_f64(best, vabdq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i)));
    double result = vmaxvq_f64(best);
    for (std::size_t i = full; i < n; ++i) {
        const double d = a[i] - b[i];
        result = std::max(result, d < 0.0 ? -d : d);
    }
    return result;
}

}  // namespace rarehit::kernels::neon

#endif
