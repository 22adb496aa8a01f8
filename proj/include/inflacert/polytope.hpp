#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "inflacert/family.hpp"
#include "inflacert/linalg.hpp"

// The feasibility region of the correlator parameters: sixteen
// halfspaces in (F_AB, F_BC, F_AC, F_ABC), one per sign tuple (i,j,k,t),
// each equivalent to 16*q(i,j,k,t) >= 0.

namespace inflacert::polytope {

using family::CorrelatorPoint;
using family::UParam;

// Coefficients multiply (F_AB, F_AC, F_BC, F_ABC) in that order; the
// offset absorbs the constant 1 and the u-dependent terms.
template <class T>
struct HalfspaceRow {
    std::array<T, 4> c;
    T offset;

    T value(const CorrelatorPoint<T>& F) const {
        return c[0] * F.f_ab + c[1] * F.f_ac + c[2] * F.f_bc + c[3] * F.f_abc +
               offset;
    }
    // signs of (i,j,k,t) whose probability this row bounds
    std::array<int, 4> outcome_tuple() const {
        const int s1 = Scalar<T>::to_double(c[0]) > 0 ? 1 : -1;
        const int s2 = Scalar<T>::to_double(c[1]) > 0 ? 1 : -1;
        const int s3 = Scalar<T>::to_double(c[2]) > 0 ? 1 : -1;
        const int s4 = Scalar<T>::to_double(c[3]) > 0 ? 1 : -1;
        return {s3 * s4, s2 * s4, s1 * s4, s1 * s2 * s3};
    }
};

template <class T>
struct HalfspaceSystem {
    UParam<T> u;
    std::array<HalfspaceRow<T>, 16> rows;
};

template <class T>
struct Polytope4 {
    HalfspaceSystem<T> halfspaces;
    std::vector<CorrelatorPoint<T>> vertices; // filled on demand
    bool vertices_computed = false;
};

namespace detail {
// Printed row table, top to bottom: sign pattern on (F_AB,F_AC,F_BC,F_ABC),
// then the coefficient of u^2(u^2-v^2), of v^2(u^2-v^2), and of 8u^3v^3.
struct RowSpec {
    int s_ab, s_ac, s_bc, s_abc;
    int ku, kv, kw;
};
inline constexpr std::array<RowSpec, 16> kRowTable = {{
    {-1, -1, -1, +1, +6, 0, -1},
    {+1, +1, +1, -1, 0, -6, -1},
    {-1, +1, +1, -1, 0, +2, +1},
    {+1, -1, -1, +1, -2, 0, +1},
    {+1, -1, +1, -1, 0, +2, +1},
    {-1, +1, -1, +1, -2, 0, +1},
    {+1, +1, -1, +1, -2, 0, -1},
    {-1, -1, +1, -1, 0, +2, -1},
    {+1, +1, -1, -1, 0, +2, +1},
    {-1, -1, +1, +1, -2, 0, +1},
    {+1, -1, +1, +1, -2, 0, -1},
    {-1, +1, -1, -1, 0, +2, -1},
    {-1, +1, +1, +1, -2, 0, -1},
    {+1, -1, -1, -1, 0, +2, -1},
    {-1, -1, -1, -1, 0, -6, +1},
    {+1, +1, +1, +1, +6, 0, +1},
}};
} // namespace detail

template <class T>
Polytope4<T> build_polytope(const UParam<T>& up) {
    Polytope4<T> poly;
    poly.halfspaces.u = up;
    const T d = up.delta();
    const T u2d = up.s * d;
    const T v2d = up.v_sq() * d;
    const T w8 = up.e_abc();
    for (int r = 0; r < 16; ++r) {
        const auto& spec = detail::kRowTable[r];
        HalfspaceRow<T>& row = poly.halfspaces.rows[r];
        row.c = {T(spec.s_ab), T(spec.s_ac), T(spec.s_bc), T(spec.s_abc)};
        row.offset = T(1) + T(spec.ku) * u2d + T(spec.kv) * v2d + T(spec.kw) * w8;
    }
    return poly;
}

template <class T>
bool contains(const Polytope4<T>& poly, const CorrelatorPoint<T>& F) {
    for (const auto& row : poly.halfspaces.rows)
        if (!Scalar<T>::nonneg(row.value(F)))
            return false;
    return true;
}

template <class T>
int active_row_count(const Polytope4<T>& poly, const CorrelatorPoint<T>& F) {
    int n = 0;
    for (const auto& row : poly.halfspaces.rows)
        if (Scalar<T>::is_zero(row.value(F)))
            ++n;
    return n;
}

// All vertices, by solving every 4-subset of rows with a nonsingular
// coefficient matrix and keeping solutions that satisfy all sixteen
// rows.  Deterministic order, duplicates merged.
template <class T>
std::vector<CorrelatorPoint<T>> enumerate_vertices(const Polytope4<T>& poly) {
    std::vector<CorrelatorPoint<T>> out;
    const auto& rows = poly.halfspaces.rows;
    const auto same = [](const CorrelatorPoint<T>& a, const CorrelatorPoint<T>& b) {
        if constexpr (Scalar<T>::exact) {
            return a.f_ab == b.f_ab && a.f_bc == b.f_bc && a.f_ac == b.f_ac &&
                   a.f_abc == b.f_abc;
        } else {
            const double tol = 1e-9;
            return std::fabs(a.f_ab - b.f_ab) <= tol &&
                   std::fabs(a.f_bc - b.f_bc) <= tol &&
                   std::fabs(a.f_ac - b.f_ac) <= tol &&
                   std::fabs(a.f_abc - b.f_abc) <= tol;
        }
    };
    std::vector<std::vector<T>> M(4, std::vector<T>(4));
    std::vector<T> rhs(4), x;
    for (int a = 0; a < 16; ++a)
        for (int b = a + 1; b < 16; ++b)
            for (int c = b + 1; c < 16; ++c)
                for (int e = c + 1; e < 16; ++e) {
                    const std::array<int, 4> idx = {a, b, c, e};
                    for (int r = 0; r < 4; ++r) {
                        for (int col = 0; col < 4; ++col)
                            M[r][col] = rows[idx[r]].c[col];
                        rhs[r] = -rows[idx[r]].offset;
                    }
                    if (inflacert::detail::gauss_solve(M, rhs, x) !=
                        inflacert::detail::SolveStatus::Unique)
                        continue;
                    // solution order is (F_AB, F_AC, F_BC, F_ABC)
                    const CorrelatorPoint<T> F{x[0], x[2], x[1], x[3]};
                    if (!contains(poly, F))
                        continue;
                    bool dup = false;
                    for (const auto& known : out)
                        if (same(known, F)) {
                            dup = true;
                            break;
                        }
                    if (!dup)
                        out.push_back(F);
                }
    return out;
}

template <class T>
void ensure_vertices(Polytope4<T>& poly) {
    if (!poly.vertices_computed) {
        poly.vertices = enumerate_vertices(poly);
        poly.vertices_computed = true;
    }
}

template <class T>
bool is_empty(const UParam<T>& up) {
    return enumerate_vertices(build_polytope(up)).empty();
}

// The reference correlator point F_AB = F_BC = F_AC = 2 v^2 (u^2 - v^2),
// F_ABC = 1 - 8 u^3 v^3.  A vertex of the polytope on the lower part of
// the parameter range; leaves the polytope near u ~ 0.8457.
template <class T>
CorrelatorPoint<T> qplus_vertex_point(const UParam<T>& up) {
    const T f2 = T(2) * up.v_sq() * up.delta();
    const T f3 = T(1) - up.e_abc();
    return CorrelatorPoint<T>{f2, f2, f2, f3};
}

template <class T>
CorrelatorPoint<T> qplus_vertex(const UParam<T>& up) {
    const CorrelatorPoint<T> F = qplus_vertex_point(up);
    if (!contains(build_polytope(up), F))
        throw VertexOutsidePolytope("reference vertex lies outside the polytope at u = " +
                                    Scalar<T>::str(up.u));
    return F;
}

// Boundary of the slice F_AB = F_BC = F_AC = F2 against F_ABC = F3,
// as an ordered closed polygon (possibly degenerate).
template <class T>
std::vector<std::array<T, 2>> slice_f2f3(const Polytope4<T>& poly) {
    struct Line {
        T a, b, off; // a*F2 + b*F3 + off >= 0
    };
    std::vector<Line> lines;
    for (const auto& row : poly.halfspaces.rows)
        lines.push_back({row.c[0] + row.c[1] + row.c[2], row.c[3], row.offset});

    const auto ok = [&lines](const T& f2, const T& f3) {
        for (const auto& l : lines)
            if (!Scalar<T>::nonneg(l.a * f2 + l.b * f3 + l.off))
                return false;
        return true;
    };

    std::vector<std::array<T, 2>> pts;
    std::vector<std::vector<T>> M(2, std::vector<T>(2));
    std::vector<T> rhs(2), x;
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            M[0][0] = lines[i].a;
            M[0][1] = lines[i].b;
            M[1][0] = lines[j].a;
            M[1][1] = lines[j].b;
            rhs[0] = -lines[i].off;
            rhs[1] = -lines[j].off;
            if (inflacert::detail::gauss_solve(M, rhs, x) !=
                inflacert::detail::SolveStatus::Unique)
                continue;
            if (!ok(x[0], x[1]))
                continue;
            bool dup = false;
            for (const auto& p : pts) {
                const double dx = Scalar<T>::to_double(p[0] - x[0]);
                const double dy = Scalar<T>::to_double(p[1] - x[1]);
                if (std::fabs(dx) <= 1e-9 && std::fabs(dy) <= 1e-9) {
                    dup = true;
                    break;
                }
            }
            if (!dup)
                pts.push_back({x[0], x[1]});
        }
    if (pts.size() > 2) {
        double cx = 0, cy = 0;
        for (const auto& p : pts) {
            cx += Scalar<T>::to_double(p[0]);
            cy += Scalar<T>::to_double(p[1]);
        }
        cx /= double(pts.size());
        cy /= double(pts.size());
        std::sort(pts.begin(), pts.end(), [&](const auto& p, const auto& q) {
            const double ap = std::atan2(Scalar<T>::to_double(p[1]) - cy,
                                         Scalar<T>::to_double(p[0]) - cx);
            const double aq = std::atan2(Scalar<T>::to_double(q[1]) - cy,
                                         Scalar<T>::to_double(q[0]) - cx);
            return ap < aq;
        });
    }
    return pts;
}

} // namespace inflacert::polytope
