#include <algorithm>
#include <cmath>

#include "rarehit/kernels.hpp"

namespace rarehit::kernels::scalar {

void spmv(const CsrMatrix& m, std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        double acc = 0.0;
        for (std::uint32_t e = m.row_ptr[i]; e < m.row_ptr[i + 1]; ++e) acc += m.val[e] * in[m.col[e]];
        out[i] = acc;
    }
}

double sum(std::span<const double> x) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t full = x.size() & ~std::size_t{3};
    for (std::size_t i = 0; i < full; i += 4)
        for (std::size_t l = 0; l < 4; ++l) lane[l] += x[i + l];
    for (std::size_t i = full; i < x.size(); ++i) lane[i - full] += x[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, std::abs(a[i] - b[i]));
    return best;
}

}  // namespace rarehit::kernels::scalar
