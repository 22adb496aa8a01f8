#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "inflacert/lpcore.hpp"
#include "inflacert/polytope.hpp"

// The proof pipeline: certify a single (u, F, t) point, extend one
// certificate to the whole polytope by minimizing its relaxed margin
// exactly (the margin is quadratic in F), sweep the certificate chain
// along u, and render certificates as polynomial inequalities valid
// for arbitrary binary triangle-local distributions.

namespace inflacert::certify {

using family::BinaryDist3;
using family::BinaryDist4;
using family::CorrelatorPoint;
using family::UParam;
using inflation::ConstraintOptions;
using inflation::InflationProblem;
using lpcore::FarkasCertificate;

enum class Verdict { Nonlocal, LPFeasible };

template <class T>
struct PointVerdict {
    Verdict status;
    std::optional<FarkasCertificate<T>> certificate;
    std::string notes;
};

namespace detail {

// 2*q(.,.,.,t) without the nonnegativity gate; used where only the
// F-independent marginals matter.
template <class T>
BinaryDist3<T> conditional_slice_unchecked(const BinaryDist4<T>& q, int t) {
    BinaryDist3<T> out;
    out.t_label = t;
    for (int i : {+1, -1})
        for (int j : {+1, -1})
            for (int k : {+1, -1})
                out.at(i, j, k) = q.at(i, j, k, t) + q.at(i, j, k, t);
    return out;
}

template <class T>
std::array<std::string, 4> point_strings(const CorrelatorPoint<T>& F) {
    return {Scalar<T>::str(F.f_ab), Scalar<T>::str(F.f_bc),
            Scalar<T>::str(F.f_ac), Scalar<T>::str(F.f_abc)};
}

} // namespace detail

template <class T>
PointVerdict<T> certify_point(const UParam<T>& up, const CorrelatorPoint<T>& F,
                              int t, const ConstraintOptions& options = {}) {
    const BinaryDist4<T> q4 = family::eval_q(up, F);
    const BinaryDist3<T> q3 = family::condition_q(q4, t);
    const InflationProblem<T> prob = inflation::build_inflation_lp(q3, options);
    auto res = lpcore::solve_feasibility(prob);
    PointVerdict<T> verdict;
    if (res.status == lpcore::FeasStatus::Feasible) {
        verdict.status = Verdict::LPFeasible;
        return verdict;
    }
    FarkasCertificate<T> cert = std::move(*res.certificate);
    cert.provenance.u = Scalar<T>::str(up.u);
    cert.provenance.t = t;
    cert.provenance.F = detail::point_strings(F);
    if (!lpcore::verify_certificate(cert, prob))
        throw Error("internal: unverifiable certificate from certify_point");
    verdict.status = Verdict::Nonlocal;
    verdict.certificate = std::move(cert);
    return verdict;
}

template <class T>
struct CoverageResult {
    bool covered = false;
    T min_margin{};
    CorrelatorPoint<T> argmin{};
};

namespace detail {

// m(F) = y.b(F) - max(y.A) as a quadratic c0 + g.F + F^T Q F in the
// component order (f_ab, f_bc, f_ac, f_abc).
template <class T>
struct MarginQuadratic {
    T c0{};
    std::array<T, 4> g{};
    std::array<std::array<T, 4>, 4> Q{};

    T eval(const CorrelatorPoint<T>& F) const {
        const std::array<T, 4> x = {F.f_ab, F.f_bc, F.f_ac, F.f_abc};
        T acc = c0;
        for (int i = 0; i < 4; ++i) {
            acc += g[i] * x[i];
            for (int j = 0; j < 4; ++j)
                acc += Q[i][j] * x[i] * x[j];
        }
        return acc;
    }
};

// Affine form of the conditional entry q^t(i,j,k) in F.
template <class T>
void conditional_affine(const UParam<T>& up, int t, int entry_idx, T& base,
                        std::array<T, 4>& lin) {
    const int i = family::pm_of((entry_idx >> 2) & 1);
    const int j = family::pm_of((entry_idx >> 1) & 1);
    const int k = family::pm_of(entry_idx & 1);
    const int ij = i * j, jk = j * k, ki = k * i, ijk = i * j * k;
    const T d = up.delta();
    base = (T(1) + d * d * (ij + jk + ki) + d * ((i + j + k) * t) +
            up.e_abc() * ijk) / 8;
    lin = {T(t * ij) / 8, T(t * jk) / 8, T(t * ki) / 8, T(t * ijk) / 8};
}

template <class T>
MarginQuadratic<T> margin_quadratic(const UParam<T>& up, int t,
                                    const FarkasCertificate<T>& cert) {
    // A concrete problem at this u supplies the F-independent pieces;
    // the tested-distribution entries feed only the hierarchy right
    // sides, which are rebuilt symbolically below.
    const BinaryDist4<T> q4 = family::eval_q(up, family::correlator_origin<T>());
    const BinaryDist3<T> q3 = conditional_slice_unchecked(q4, t);
    const InflationProblem<T> prob =
        inflation::build_inflation_lp(q3, ConstraintOptions::parse(cert.provenance.options));

    std::vector<T> y_rows;
    lpcore::detail::signed_multipliers(cert, prob, y_rows);

    MarginQuadratic<T> quad;
    // max(y.A) over the simplex columns is independent of F
    {
        std::vector<T> col_sum(prob.n_cols, T(0));
        for (std::size_t r = 0; r < prob.rows.size(); ++r) {
            if (Scalar<T>::is_zero(y_rows[r]))
                continue;
            for (const auto& [col, w] : prob.rows[r].coeffs)
                col_sum[col] += y_rows[r] * w;
        }
        T best = col_sum.empty() ? T(0) : col_sum[0];
        for (const auto& v : col_sum)
            if (lpcore::detail::strictly_positive(T(v - best)))
                best = v;
        quad.c0 = -best;
    }

    for (std::size_t r = 0; r < prob.rows.size(); ++r) {
        if (Scalar<T>::is_zero(y_rows[r]))
            continue;
        const auto& row = prob.rows[r];
        if (row.kind == inflation::RowKind::HigherDegree) {
            quad.c0 += y_rows[r] * row.rhs; // marginal products, F-independent
        } else if (row.kind == inflation::RowKind::Hierarchy) {
            T b1, b2;
            std::array<T, 4> l1, l2;
            conditional_affine(up, t, row.hier_v1, b1, l1);
            conditional_affine(up, t, row.hier_v2, b2, l2);
            quad.c0 += y_rows[r] * b1 * b2;
            for (int i = 0; i < 4; ++i) {
                quad.g[i] += y_rows[r] * (b1 * l2[i] + b2 * l1[i]);
                for (int j = 0; j < 4; ++j)
                    quad.Q[i][j] += y_rows[r] * l1[i] * l2[j];
            }
        }
        // symmetry and LPI rows have zero right side
    }
    return quad;
}

// Minimizer-order coefficient vector of a polytope row.
template <class T>
std::array<T, 4> row_normal(const polytope::HalfspaceRow<T>& row) {
    return {row.c[0], row.c[2], row.c[1], row.c[3]};
}

} // namespace detail

// Exact minimization of the relaxed margin over the whole polytope:
// candidates are the polytope vertices plus every stationary point of
// the quadratic restricted to the affine hull of up to three active
// rows.  covered = (minimum > 0).
template <class T>
CoverageResult<T> polytope_coverage(const UParam<T>& up,
                                    const FarkasCertificate<T>& cert, int t) {
    const auto poly = polytope::build_polytope(up);
    const auto vertices = polytope::enumerate_vertices(poly);
    if (vertices.empty())
        throw EmptyPolytope("polytope is empty at u = " + Scalar<T>::str(up.u));

    const auto quad = detail::margin_quadratic(up, t, cert);

    CoverageResult<T> result;
    bool have = false;
    const auto consider = [&](const CorrelatorPoint<T>& F) {
        const T val = quad.eval(F);
        if (!have || val < result.min_margin) {
            result.min_margin = val;
            result.argmin = F;
            have = true;
        }
    };
    for (const auto& v : vertices)
        consider(v);

    // stationary points: solve  [2Q E^T; E 0] [F; lambda] = [-g; -offsets]
    const auto& rows = poly.halfspaces.rows;
    const auto try_subset = [&](const std::vector<int>& idx) {
        const std::size_t k = idx.size();
        const std::size_t n = 4 + k;
        std::vector<std::vector<T>> M(n, std::vector<T>(n, T(0)));
        std::vector<T> rhs(n, T(0)), x;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j)
                M[i][j] = quad.Q[i][j] + quad.Q[j][i];
            rhs[i] = -quad.g[i];
        }
        for (std::size_t s = 0; s < k; ++s) {
            const auto normal = detail::row_normal(rows[idx[s]]);
            for (int j = 0; j < 4; ++j) {
                M[4 + s][j] = normal[j];
                M[j][4 + s] = normal[j];
            }
            rhs[4 + s] = -rows[idx[s]].offset;
        }
        const auto status = inflacert::detail::gauss_solve(M, rhs, x);
        if (status != inflacert::detail::SolveStatus::Unique &&
            status != inflacert::detail::SolveStatus::Underdetermined)
            return;
        const CorrelatorPoint<T> F{x[0], x[2], x[1], x[3]};
        if (polytope::contains(poly, F))
            consider(F);
    };

    try_subset({});
    for (int a = 0; a < 16; ++a) {
        try_subset({a});
        for (int b = a + 1; b < 16; ++b) {
            try_subset({a, b});
            for (int c = b + 1; c < 16; ++c)
                try_subset({a, b, c});
        }
    }

    result.covered = lpcore::detail::strictly_positive(result.min_margin);
    return result;
}

// ----- continuation along u (float mode) -----

struct SweepSegment {
    double u_start = 0, u_end = 0;
    FarkasCertificate<double> certificate;
};

struct SweepReport {
    double u_from = 0, u_to = 0;
    bool reached_stop = false;
    double frontier = 0;
    std::vector<SweepSegment> segments;
};

struct SweepParams {
    double scan_step = 1e-4;
    double refine = 1e-6;
    ConstraintOptions options{};
};

struct CoverageLost : Error {
    double frontier;
    SweepReport partial;
    CoverageLost(double f, SweepReport rep)
        : Error("coverage lost at u = " + Scalar<double>::str(f)), frontier(f),
          partial(std::move(rep)) {}
};

inline double sweep_coverage_min(double u, const FarkasCertificate<double>& cert,
                                 int t) {
    const auto up = family::make_uparam(u);
    try {
        return Scalar<double>::to_double(
            polytope_coverage(up, cert, t).min_margin);
    } catch (const EmptyPolytope&) {
        return -1.0;
    }
}

// Repeatedly certify at u, check whole-polytope coverage, then push the
// same certificate as far toward u_stop as its coverage minimum stays
// positive (grid scan + bisection refine), and restart from there.
inline SweepReport sweep(double u_start, double u_stop,
                         const SweepParams& params = {}) {
    constexpr int t = -1;
    SweepReport report;
    report.u_from = u_start;
    report.u_to = u_stop;
    report.frontier = u_start;
    const double dir = u_stop >= u_start ? 1.0 : -1.0;

    double u = u_start;
    while (true) {
        const auto up = family::make_uparam(u);
        const auto F = polytope::qplus_vertex(up);
        const auto verdict = certify_point(up, F, t, params.options);
        if (verdict.status != Verdict::Nonlocal)
            throw CoverageLost(u, report);
        const auto& cert = *verdict.certificate;
        if (!polytope_coverage(up, cert, t).covered)
            throw CoverageLost(u, report);
        report.frontier = u;

        if (dir * (u_stop - u) <= 0)
            break;

        // grid scan toward u_stop
        double last_good = u;
        double first_bad = u_stop + dir; // sentinel: none found
        bool found_bad = false;
        for (int k = 1;; ++k) {
            double probe = u + dir * params.scan_step * k;
            if (dir * (probe - u_stop) >= 0)
                probe = u_stop;
            if (sweep_coverage_min(probe, cert, t) > 0) {
                last_good = probe;
                if (probe == u_stop)
                    break;
            } else {
                first_bad = probe;
                found_bad = true;
                break;
            }
        }
        if (found_bad) {
            double lo = last_good, hi = first_bad;
            while (std::fabs(hi - lo) > params.refine) {
                const double mid = (lo + hi) / 2;
                if (sweep_coverage_min(mid, cert, t) > 0)
                    lo = mid;
                else
                    hi = mid;
            }
            last_good = lo;
        }

        if (std::fabs(last_good - u) <= params.refine) {
            // no usable progress: the frontier is here
            throw CoverageLost(u, report);
        }
        // segment invariant: coverage at both endpoints and midpoint
        const double mid = (u + last_good) / 2;
        if (!(sweep_coverage_min(mid, cert, t) > 0) ||
            !(sweep_coverage_min(last_good, cert, t) > 0))
            throw CoverageLost(u, report);
        report.segments.push_back({u, last_good, cert});
        report.frontier = last_good;
        if (last_good == u_stop || std::fabs(last_good - u_stop) < 1e-12) {
            report.reached_stop = true;
            break;
        }
        u = last_good;
    }
    if (std::fabs(report.frontier - u_stop) < 1e-12)
        report.reached_stop = true;
    return report;
}

// ----- inequality export -----

// y.b(q) <= max_j (y.A(q))_j, rendered in the eight entries q(i,j,k).
// The left side collects quadratic terms from hierarchy rows and cubic
// marginal products from higher-degree rows; each column of y.A is an
// affine function of the entries through the single-party marginals
// substituted into the LPI rows.
template <class T>
struct PolynomialInequality {
    // monomials: sorted entry-index multisets of degree 2 or 3
    std::vector<std::pair<std::vector<uint8_t>, T>> lhs;
    // affine column expressions: constant + coefficients on the entries
    std::vector<std::pair<T, std::array<T, 8>>> rhs;

    T eval_lhs(const BinaryDist3<T>& q) const {
        T acc(0);
        for (const auto& [mono, coef] : lhs) {
            T term = coef;
            for (const uint8_t e : mono)
                term *= q.p[e];
            acc += term;
        }
        return acc;
    }
    T eval_rhs_max(const BinaryDist3<T>& q) const {
        T best(0);
        bool have = false;
        for (const auto& [c0, coefs] : rhs) {
            T val = c0;
            for (int e = 0; e < 8; ++e)
                val += coefs[e] * q.p[e];
            if (!have || lpcore::detail::strictly_positive(T(val - best))) {
                best = val;
                have = true;
            }
        }
        return best;
    }
    // satisfied by every triangle-local distribution
    bool satisfied_by(const BinaryDist3<T>& q) const {
        const T l = eval_lhs(q), r = eval_rhs_max(q);
        if constexpr (Scalar<T>::exact)
            return !(l > r);
        else
            return l <= r + 1e-12;
    }

    std::string render() const;
};

namespace detail {

inline std::string entry_name(int e) {
    const auto pm = [](int bit) { return bit == 0 ? "+1" : "-1"; };
    return std::string("q(") + pm((e >> 2) & 1) + "," + pm((e >> 1) & 1) + "," +
           pm(e & 1) + ")";
}

} // namespace detail

template <class T>
std::string PolynomialInequality<T>::render() const {
    std::ostringstream os;
    os << "# network inequality: satisfied by every binary-outcome triangle-local distribution\n";
    os << "# variables: q(i,j,k) with outcomes +1/-1\n";
    os << "lhs:";
    bool first = true;
    for (const auto& [mono, coef] : lhs) {
        os << (first ? " " : " + ") << "(" << Scalar<T>::str(coef) << ")";
        for (const uint8_t e : mono)
            os << "*" << detail::entry_name(e);
        first = false;
    }
    if (first)
        os << " 0";
    os << "\nrhs: max of\n";
    for (const auto& [c0, coefs] : rhs) {
        os << "  (" << Scalar<T>::str(c0) << ")";
        for (int e = 0; e < 8; ++e)
            if (!Scalar<T>::is_zero(coefs[e]))
                os << " + (" << Scalar<T>::str(coefs[e]) << ")*"
                   << detail::entry_name(e);
        os << "\n";
    }
    os << "relation: lhs <= rhs\n";
    return os.str();
}

template <class T>
PolynomialInequality<T> export_inequality(const FarkasCertificate<T>& cert) {
    // structural data (marginal supports, counts) is independent of the
    // tested distribution; a uniform dummy provides it
    BinaryDist3<T> dummy;
    for (auto& x : dummy.p)
        x = T(1) / 8;
    const auto options = ConstraintOptions::parse(cert.provenance.options);
    const InflationProblem<T> prob = inflation::build_inflation_lp(dummy, options);

    std::vector<T> y_rows;
    lpcore::detail::signed_multipliers(cert, prob, y_rows);

    PolynomialInequality<T> out;

    // left side
    std::map<std::vector<uint8_t>, T> terms;
    for (std::size_t r = 0; r < prob.rows.size(); ++r) {
        if (Scalar<T>::is_zero(y_rows[r]))
            continue;
        const auto& row = prob.rows[r];
        if (row.kind == inflation::RowKind::Hierarchy) {
            std::vector<uint8_t> mono = {row.hier_v1, row.hier_v2};
            std::sort(mono.begin(), mono.end());
            terms.emplace(std::move(mono), T(0)).first->second += y_rows[r];
        } else if (row.kind == inflation::RowKind::HigherDegree) {
            const int a12 = (row.hd_bits >> 2) & 1, b12 = (row.hd_bits >> 1) & 1,
                      c12 = row.hd_bits & 1;
            // marginal of party X at outcome bit = sum of 4 entries
            for (int e1 = 0; e1 < 8; ++e1) {
                if (((e1 >> 2) & 1) != a12)
                    continue;
                for (int e2 = 0; e2 < 8; ++e2) {
                    if (((e2 >> 1) & 1) != b12)
                        continue;
                    for (int e3 = 0; e3 < 8; ++e3) {
                        if ((e3 & 1) != c12)
                            continue;
                        std::vector<uint8_t> mono = {uint8_t(e1), uint8_t(e2),
                                                     uint8_t(e3)};
                        std::sort(mono.begin(), mono.end());
                        terms.emplace(std::move(mono), T(0)).first->second +=
                            y_rows[r];
                    }
                }
            }
        }
    }
    for (auto& [mono, coef] : terms)
        if (!Scalar<T>::is_zero(coef))
            out.lhs.emplace_back(mono, coef);

    // right side: one affine expression per column, deduplicated
    std::vector<T> col_const(prob.n_cols, T(0));
    std::vector<std::array<T, 8>> col_lin(prob.n_cols);
    for (auto& arr : col_lin)
        arr.fill(T(0));
    for (std::size_t r = 0; r < prob.rows.size(); ++r) {
        if (Scalar<T>::is_zero(y_rows[r]))
            continue;
        const auto& row = prob.rows[r];
        if (row.kind == inflation::RowKind::Lpi) {
            for (const auto& [col, w] : row.base_counts)
                col_const[col] += y_rows[r] * w;
            // subtract marg(party, bit) * factored part, expanded into entries
            for (const auto& [col, w] : row.factored_counts) {
                const T scaled = y_rows[r] * w;
                for (int e = 0; e < 8; ++e) {
                    const int bit_of_party = row.lpi_party == 0 ? ((e >> 2) & 1)
                                          : row.lpi_party == 1 ? ((e >> 1) & 1)
                                                               : (e & 1);
                    if (bit_of_party == row.lpi_bit)
                        col_lin[col][e] -= scaled;
                }
            }
        } else {
            for (const auto& [col, w] : row.coeffs)
                col_const[col] += y_rows[r] * w;
        }
    }
    std::map<std::pair<std::string, std::string>, bool> seen;
    for (std::size_t col = 0; col < prob.n_cols; ++col) {
        std::string key_c = Scalar<T>::str(col_const[col]);
        std::string key_l;
        for (int e = 0; e < 8; ++e)
            key_l += Scalar<T>::str(col_lin[col][e]) + ";";
        if (seen.emplace(std::make_pair(key_c, key_l), true).second)
            out.rhs.emplace_back(col_const[col], col_lin[col]);
    }
    return out;
}

} // namespace inflacert::certify
