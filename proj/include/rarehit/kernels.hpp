#pragma once

// Data-parallel inner loops behind the exact tail computation and the
// sup-norm diagnostics. Every kernel has a scalar reference and SIMD variants
// that reproduce the reference bit for bit: the reference is written with
// the same association order the vector code uses.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace rarehit::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

/// ISAs the running CPU can execute (always includes Scalar).
std::vector<Isa> available_isas();

/// Best available ISA, overridable with RAREHIT_ISA=scalar|avx2|neon.
Isa active_isa();

/// Sparse matrix in compressed rows: out[i] = sum_e val[e] * in[col[e]].
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint32_t> row_ptr{0};
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::size_t nonzeros() const noexcept { return val.size(); }
};

/// Sliced-ELL layout: groups of kSlice rows padded to the group's longest row,
/// stored slot-major so one vector load picks up one entry of every row.
struct SlicedEll {
    static constexpr std::size_t kSlice = 4;

    std::size_t rows = 0;
    std::vector<std::uint32_t> slice_ptr{0};  // offset of each slice, in entries
    std::vector<std::uint32_t> slice_width;
    std::vector<std::int32_t> col;
    std::vector<double> val;

    static SlicedEll from_csr(const CsrMatrix& csr);
};

/// Step operator for one push of a probability vector.
class SparseStep {
public:
    SparseStep() = default;
    explicit SparseStep(CsrMatrix csr);

    std::size_t size() const noexcept { return csr_.rows; }
    const CsrMatrix& csr() const noexcept { return csr_; }

    /// out = M * in. `out` must not alias `in`.
    void apply(std::span<const double> in, std::span<double> out, Isa isa) const;
    void apply(std::span<const double> in, std::span<double> out) const { apply(in, out, active_isa()); }

private:
    CsrMatrix csr_;
    SlicedEll ell_;
};

/// Sum with four interleaved partial sums combined as (s0 + s1) + (s2 + s3).
double sum(std::span<const double> x, Isa isa);
inline double sum(std::span<const double> x) { return sum(x, active_isa()); }

/// max_i |a[i] - b[i]| over the common length; 0 for empty input.
double max_abs_diff(std::span<const double> a, std::span<const double> b, Isa isa);
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return max_abs_diff(a, b, active_isa());
}

namespace scalar {
void spmv(const CsrMatrix& m, std::span<const double> in, std::span<double> out);
double sum(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
bool supported() noexcept;
void spmv(const SlicedEll& m, std::span<const double> in, std::span<double> out);
double sum(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void spmv(const SlicedEll& m, std::span<const double> in, std::span<double> out);
double sum(std::span<const double> x);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace neon
#endif

}  // namespace rarehit::kernels
