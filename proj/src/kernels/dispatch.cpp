#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

#include "rarehit/error.hpp"
#include "rarehit/kernels.hpp"

namespace rarehit::kernels {

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

std::vector<Isa> available_isas() {
    std::vector<Isa> isas{Isa::Scalar};
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2::supported()) isas.push_back(Isa::Avx2);
#endif
#if defined(__aarch64__)
    isas.push_back(Isa::Neon);
#endif
    return isas;
}

namespace {

Isa detect() {
    const auto isas = available_isas();
    if (const char* env = std::getenv("RAREHIT_ISA")) {
        const std::string wanted(env);
        for (Isa isa : isas)
            if (to_string(isa) == wanted) return isa;
    }
    return isas.back();
}

}  // namespace

Isa active_isa() {
    static const Isa isa = detect();
    return isa;
}

SlicedEll SlicedEll::from_csr(const CsrMatrix& csr) {
    if (csr.cols > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
        throw Error(ErrorCode::EnumerationTooLarge, "state space too large for 32-bit gather indices");
    SlicedEll ell;
    ell.rows = csr.rows;
    const std::size_t slices = (csr.rows + kSlice - 1) / kSlice;
    for (std::size_t s = 0; s < slices; ++s) {
        std::uint32_t width = 0;
        for (std::size_t r = s * kSlice; r < std::min(csr.rows, (s + 1) * kSlice); ++r)
            width = std::max(width, csr.row_ptr[r + 1] - csr.row_ptr[r]);
        const std::size_t base = ell.col.size();
        ell.col.resize(base + width * kSlice, 0);
        ell.val.resize(base + width * kSlice, 0.0);
        for (std::size_t lane = 0; lane < kSlice; ++lane) {
            const std::size_t r = s * kSlice + lane;
            if (r >= csr.rows) break;
            std::size_t j = 0;
            for (std::uint32_t e = csr.row_ptr[r]; e < csr.row_ptr[r + 1]; ++e, ++j) {
                ell.col[base + j * kSlice + lane] = static_cast<std::int32_t>(csr.col[e]);
                ell.val[base + j * kSlice + lane] = csr.val[e];
            }
        }
        ell.slice_width.push_back(width);
        ell.slice_ptr.push_back(static_cast<std::uint32_t>(ell.col.size()));
    }
    return ell;
}

SparseStep::SparseStep(CsrMatrix csr) : csr_(std::move(csr)), ell_(SlicedEll::from_csr(csr_)) {}

void SparseStep::apply(std::span<const double> in, std::span<double> out, Isa isa) const {
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::Avx2: avx2::spmv(ell_, in, out); return;
#endif
#if defined(__aarch64__)
        case Isa::Neon: neon::spmv(ell_, in, out); return;
#endif
        default: scalar::spmv(csr_, in, out); return;
    }
}

double sum(std::span<const double> x, Isa isa) {
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::Avx2: return avx2::sum(x);
#endif
#if defined(__aarch64__)
        case Isa::Neon: return neon::sum(x);
#endif
        default: return scalar::sum(x);
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b, Isa isa) {
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::Avx2: return avx2::max_abs_diff(a, b);
#endif
#if defined(__aarch64__)
        case Isa::Neon: return neon::max_abs_diff(a, b);
#endif
        default: return scalar::max_abs_diff(a, b);
    }
}

}  // namespace rarehit::kernels
