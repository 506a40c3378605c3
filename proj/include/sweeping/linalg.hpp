#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace sweeping::detail {

/// Row-major dense n x n system solve by Gaussian elimination with partial
/// pivoting. Returns nullopt when a pivot falls below the singularity guard.
/// Sizes stay <= 65 (solver workspaces), so no blocking or factor reuse.
inline std::optional<std::vector<double>> gauss_solve(std::vector<double> a,
                                                      std::vector<double> b,
                                                      double pivot_tol = 1e-13) {
    const std::size_t n = b.size();
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return std::nullopt;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::fabs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::fabs(a[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best <= pivot_tol * scale) return std::nullopt;
        if (piv != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * x[c];
        x[i] = s / a[i * n + i];
    }
    return x;
}

} // namespace sweeping::detail
