#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "inflacert/inflation.hpp"

// Feasibility over the probability simplex with certificate
// extraction.  Phase-one simplex, Bland's anti-cycling rule, exact
// rational pivoting when the scalars are rational.  An infeasible
// verdict is never returned bare: the dual multipliers y at
// termination satisfy  max(y.A) < y.b  over the simplex domain, which
// is what verify_certificate recomputes from scratch.

namespace inflacert::lpcore {

using inflation::InflationProblem;

// Float-mode strictness: margins and phase-one optima closer to zero
// than this are not trusted either way.
inline constexpr double kStrictness = 1e-9;

struct Provenance {
    std::string u;
    int t = 0;
    std::array<std::string, 4> F{}; // (f_ab, f_bc, f_ac, f_abc)
    std::string mode;               // "exact" | "float"
    std::string options;
};

// Nonnegative multipliers keyed by canonical inequality labels: each
// equality row <label> splits into "<label>:+" (row >= rhs) and
// "<label>:-" (-row >= -rhs).  Only nonzero entries are stored, in
// canonical row order.
template <class T>
struct FarkasCertificate {
    std::vector<std::pair<std::string, T>> y;
    T margin{};
    Provenance provenance;
};

enum class FeasStatus { Feasible, Infeasible };

template <class T>
struct FeasibilityResult {
    FeasStatus status;
    std::vector<T> witness;
    std::optional<FarkasCertificate<T>> certificate;
};

namespace detail {

inline bool strictly_positive(double x) { return x > 0; }
inline bool strictly_positive(const Rational& x) { return sgn(x) > 0; }
inline bool strictly_negative(double x) { return x < 0; }
inline bool strictly_negative(const Rational& x) { return sgn(x) < 0; }

template <class T>
struct PhaseOneOutcome {
    T objective{};
    bool optimum_clean = true; // iteration cap / ratio test never degraded
    std::vector<T> x;          // structural values
    std::vector<T> y;          // row multipliers, original row signs
};

// min sum(artificials) s.t. rows * x = rhs, x >= 0.
template <class T>
PhaseOneOutcome<T> phase_one(std::size_t n_cols,
                             const std::vector<std::vector<std::pair<uint32_t, T>>>& rows,
                             std::vector<T> rhs) {
    const std::size_t m = rows.size();
    const std::size_t width = n_cols + m + 1; // structural, artificial, rhs
    const std::size_t rhs_col = n_cols + m;
    std::vector<int> sign(m, 1);
    std::vector<T> tab((m + 1) * width, T(0));
    const auto at = [&tab, width](std::size_t r, std::size_t c) -> T& {
        return tab[r * width + c];
    };

    for (std::size_t i = 0; i < m; ++i) {
        if (strictly_negative(rhs[i])) {
            sign[i] = -1;
            rhs[i] = -rhs[i];
        }
        for (const auto& [col, w] : rows[i])
            at(i, col) = sign[i] == 1 ? w : T(-w);
        at(i, n_cols + i) = T(1);
        at(i, rhs_col) = rhs[i];
    }
    // objective row holds z_j - c_j; artificial columns start at zero
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < width; ++c)
            if (c < n_cols || c == rhs_col)
                at(m, c) += at(i, c);

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i)
        basis[i] = n_cols + i;

    const std::size_t max_iter = 100000 + 100 * (m + n_cols);

    const auto improves = [&at, m](std::size_t c) {
        if constexpr (Scalar<T>::exact)
            return strictly_positive(at(m, c));
        else
            return at(m, c) > kStrictness;
    };
    const auto pivot_ok = [&at](std::size_t r, std::size_t c) {
        if constexpr (Scalar<T>::exact)
            return strictly_positive(at(r, c));
        else
            return at(r, c) > 1e-11;
    };

    PhaseOneOutcome<T> out;
    for (std::size_t iter = 0;; ++iter) {
        if (iter >= max_iter) {
            out.optimum_clean = false;
            break;
        }
        std::size_t enter = SIZE_MAX;
        for (std::size_t c = 0; c < n_cols + m; ++c)
            if (improves(c)) {
                enter = c; // Bland: lowest index
                break;
            }
        if (enter == SIZE_MAX)
            break;
        std::size_t leave = SIZE_MAX;
        for (std::size_t i = 0; i < m; ++i) {
            if (!pivot_ok(i, enter))
                continue;
            if (leave == SIZE_MAX) {
                leave = i;
                continue;
            }
            // compare rhs[i]/a[i][e] against rhs[leave]/a[leave][e]
            const T lhs = at(i, rhs_col) * at(leave, enter);
            const T rhs_v = at(leave, rhs_col) * at(i, enter);
            bool smaller, equal_ratio;
            if constexpr (Scalar<T>::exact) {
                smaller = lhs < rhs_v;
                equal_ratio = lhs == rhs_v;
            } else {
                smaller = lhs < rhs_v - 1e-15;
                equal_ratio = std::fabs(lhs - rhs_v) <= 1e-15;
            }
            if (smaller || (equal_ratio && basis[i] < basis[leave]))
                leave = i;
        }
        if (leave == SIZE_MAX) {
            // the phase-one objective is bounded below by zero, so an
            // unbounded ratio test can only be numeric noise
            out.optimum_clean = false;
            break;
        }
        const T piv = at(leave, enter);
        for (std::size_t c = 0; c < width; ++c)
            at(leave, c) /= piv;
        at(leave, enter) = T(1);
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == leave)
                continue;
            const T f = at(r, enter);
            if (Scalar<T>::is_zero(f))
                continue;
            for (std::size_t c = 0; c < width; ++c)
                at(r, c) -= f * at(leave, c);
            at(r, enter) = T(0);
        }
        basis[leave] = enter;
    }

    out.objective = at(m, rhs_col);
    out.x.assign(n_cols, T(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n_cols)
            out.x[basis[i]] = at(i, rhs_col);
    out.y.assign(m, T(0));
    for (std::size_t i = 0; i < m; ++i) {
        // reduced cost of artificial i is 1 - y_i on the standardized rows
        const T y_std = at(m, n_cols + i) + T(1);
        out.y[i] = sign[i] == 1 ? y_std : T(-y_std);
    }
    return out;
}

// y.b - max_j (y.A)_j for signed per-row multipliers.
template <class T>
T signed_margin(const InflationProblem<T>& prob, const std::vector<T>& y_rows) {
    std::vector<T> col_sum(prob.n_cols, T(0));
    T yb(0);
    for (std::size_t i = 0; i < prob.rows.size(); ++i) {
        if (Scalar<T>::is_zero(y_rows[i]))
            continue;
        yb += y_rows[i] * prob.rows[i].rhs;
        for (const auto& [col, w] : prob.rows[i].coeffs)
            col_sum[col] += y_rows[i] * w;
    }
    T best = col_sum.empty() ? T(0) : col_sum[0];
    for (const auto& v : col_sum)
        if (strictly_positive(T(v - best)))
            best = v;
    return yb - best;
}

// Expand a label-keyed nonnegative certificate into signed per-row
// multipliers against a concrete problem.  Throws LabelMismatch on
// unknown labels or incompatible options; returns false when a stored
// multiplier is negative.
template <class T>
bool signed_multipliers(const FarkasCertificate<T>& cert,
                        const InflationProblem<T>& prob, std::vector<T>& y_rows) {
    if (cert.provenance.options != prob.options.str())
        throw LabelMismatch("certificate options '" + cert.provenance.options +
                            "' do not match problem options '" +
                            prob.options.str() + "'");
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(prob.rows.size());
    for (std::size_t i = 0; i < prob.rows.size(); ++i)
        index.emplace(prob.rows[i].label, i);
    y_rows.assign(prob.rows.size(), T(0));
    bool nonneg = true;
    for (const auto& [label, val] : cert.y) {
        if (label.size() < 2 ||
            (label.back() != '+' && label.back() != '-') ||
            label[label.size() - 2] != ':')
            throw LabelMismatch("certificate label '" + label +
                                "' lacks the :+/:- suffix");
        const bool plus = label.back() == '+';
        const auto it = index.find(label.substr(0, label.size() - 2));
        if (it == index.end())
            throw LabelMismatch("certificate label '" + label +
                                "' does not name a problem row");
        if (strictly_negative(val))
            nonneg = false;
        if (plus)
            y_rows[it->second] += val;
        else
            y_rows[it->second] -= val;
    }
    return nonneg;
}

} // namespace detail

// Independent check of an infeasibility certificate: y >= 0 and
// y.b - max(y.A) > 0, recomputed from the problem data only.  In exact
// mode this runs entirely in rational arithmetic.
template <class T>
bool verify_certificate(const FarkasCertificate<T>& cert,
                        const InflationProblem<T>& prob) {
    std::vector<T> y_rows;
    if (!detail::signed_multipliers(cert, prob, y_rows))
        return false;
    return detail::strictly_positive(detail::signed_margin(prob, y_rows));
}

// The same certificate evaluated against a different problem (other u
// or F): a positive value certifies infeasibility of that problem too.
template <class T>
T relaxed_margin(const FarkasCertificate<T>& cert, const InflationProblem<T>& prob) {
    std::vector<T> y_rows;
    detail::signed_multipliers(cert, prob, y_rows);
    return detail::signed_margin(prob, y_rows);
}

template <class T>
FeasibilityResult<T> solve_feasibility(const InflationProblem<T>& prob) {
    const std::size_t m = prob.rows.size();
    std::vector<std::vector<std::pair<uint32_t, T>>> rows;
    rows.reserve(m + 1);
    std::vector<T> rhs;
    rhs.reserve(m + 1);
    for (const auto& row : prob.rows) {
        rows.push_back(row.coeffs);
        rhs.push_back(row.rhs);
    }
    // normalization: mass variables sum to one
    std::vector<std::pair<uint32_t, T>> norm;
    norm.reserve(prob.n_cols);
    for (uint32_t c = 0; c < prob.n_cols; ++c)
        norm.emplace_back(c, T(1));
    rows.push_back(std::move(norm));
    rhs.push_back(T(1));

    const auto ph = detail::phase_one<T>(prob.n_cols, rows, rhs);
    if (!ph.optimum_clean)
        throw NumericallyAmbiguous("simplex did not reach a clean optimum");

    bool feasible;
    if constexpr (Scalar<T>::exact)
        feasible = sgn(ph.objective) == 0;
    else
        feasible = ph.objective < kStrictness;
    if (feasible) {
        const T resid = inflation::max_row_residual(prob, ph.x);
        if constexpr (Scalar<T>::exact) {
            if (sgn(resid) != 0)
                throw Error("internal: exact witness with nonzero residual");
        } else {
            if (resid > kStrictness)
                throw NumericallyAmbiguous(
                    "phase-one optimum near zero but witness residual " +
                    std::to_string(Scalar<T>::to_double(resid)));
        }
        FeasibilityResult<T> res;
        res.status = FeasStatus::Feasible;
        res.witness = ph.x;
        return res;
    }

    // Infeasible: multipliers for the problem rows (the normalization
    // multiplier is absorbed by the max over the simplex); scaled so
    // the canonical multipliers sum to one.
    std::vector<T> y_rows(ph.y.begin(), ph.y.begin() + m);
    T scale(0);
    for (const auto& v : y_rows)
        scale += Scalar<T>::abs(v);
    if (!detail::strictly_positive(scale))
        throw NumericallyAmbiguous("infeasible verdict with a zero multiplier vector");
    for (auto& v : y_rows)
        v /= scale;

    FarkasCertificate<T> cert;
    cert.margin = detail::signed_margin(prob, y_rows);
    cert.provenance.mode = Scalar<T>::exact ? "exact" : "float";
    cert.provenance.options = prob.options.str();
    for (std::size_t i = 0; i < m; ++i) {
        if (Scalar<T>::is_zero(y_rows[i]))
            continue;
        const bool plus = detail::strictly_positive(y_rows[i]);
        cert.y.emplace_back(prob.rows[i].label + (plus ? ":+" : ":-"),
                            plus ? y_rows[i] : T(-y_rows[i]));
    }
    if constexpr (Scalar<T>::exact) {
        if (sgn(cert.margin) <= 0)
            throw Error("internal: exact infeasibility with nonpositive margin");
    } else {
        if (cert.margin <= kStrictness)
            throw NumericallyAmbiguous(
                "certificate margin " +
                std::to_string(Scalar<T>::to_double(cert.margin)) +
                " below the strictness threshold");
    }
    if (!verify_certificate(cert, prob))
        throw Error("internal: certificate failed its own verification");

    FeasibilityResult<T> res;
    res.status = FeasStatus::Infeasible;
    res.certificate = std::move(cert);
    return res;
}

} // namespace inflacert::lpcore
