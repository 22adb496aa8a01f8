#pragma once

#include <cstddef>
#include <vector>

#include "inflacert/scalar.hpp"

namespace inflacert::detail {

enum class SolveStatus { Unique, Underdetermined, Inconsistent, Singular };

// Gaussian elimination on a square or rectangular system M x = rhs.
// Partial pivoting in float mode, first-nonzero pivoting in exact mode.
// Underdetermined systems get free variables set to zero, so any
// returned solution satisfies the system exactly (exact mode) or to
// rounding (float mode).
template <class T>
SolveStatus gauss_solve(std::vector<std::vector<T>> M, std::vector<T> rhs,
                        std::vector<T>& x) {
    const std::size_t m = M.size();
    const std::size_t n = m == 0 ? 0 : M[0].size();
    constexpr double pivot_eps = 1e-11;
    constexpr double resid_eps = 1e-9;

    std::vector<std::size_t> pivot_row_of_col(n, SIZE_MAX);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < m; ++col) {
        std::size_t best = SIZE_MAX;
        if constexpr (Scalar<T>::exact) {
            for (std::size_t r = rank; r < m; ++r)
                if (!Scalar<T>::is_zero(M[r][col])) {
                    best = r;
                    break;
                }
        } else {
            double best_mag = pivot_eps;
            for (std::size_t r = rank; r < m; ++r) {
                const double mag = std::fabs(Scalar<T>::to_double(M[r][col]));
                if (mag > best_mag) {
                    best_mag = mag;
                    best = r;
                }
            }
        }
        if (best == SIZE_MAX)
            continue; // free column
        std::swap(M[best], M[rank]);
        std::swap(rhs[best], rhs[rank]);
        for (std::size_t r = rank + 1; r < m; ++r) {
            if (Scalar<T>::is_zero(M[r][col]))
                continue;
            const T f = M[r][col] / M[rank][col];
            for (std::size_t c = col; c < n; ++c)
                M[r][c] -= f * M[rank][c];
            rhs[r] -= f * rhs[rank];
            M[r][col] = T(0);
        }
        pivot_row_of_col[col] = rank;
        ++rank;
    }

    for (std::size_t r = rank; r < m; ++r) {
        if constexpr (Scalar<T>::exact) {
            if (!Scalar<T>::is_zero(rhs[r]))
                return SolveStatus::Inconsistent;
        } else {
            if (std::fabs(Scalar<T>::to_double(rhs[r])) > resid_eps)
                return SolveStatus::Inconsistent;
        }
    }

    x.assign(n, T(0));
    for (std::size_t col = n; col-- > 0;) {
        const std::size_t r = pivot_row_of_col[col];
        if (r == SIZE_MAX)
            continue;
        T acc = rhs[r];
        for (std::size_t c = col + 1; c < n; ++c)
            acc -= M[r][c] * x[c];
        x[col] = acc / M[r][col];
    }
    return rank == n ? SolveStatus::Unique : SolveStatus::Underdetermined;
}

} // namespace inflacert::detail
