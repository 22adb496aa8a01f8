#pragma once

#include <array>
#include <string>
#include <vector>

#include "inflacert/scalar.hpp"

// The distribution family: the four-outcome triangle distribution, its
// binary-outcome reduction q(i,j,k,t) with four free correlator
// parameters, the conditionals q^t, and the consistency relations that
// tie the two together.

namespace inflacert::family {

// Global outcome encoding: +1 <-> bit 0, -1 <-> bit 1.
inline constexpr int bit_of(int pm) { return pm == 1 ? 0 : 1; }
inline constexpr int pm_of(int bit) { return bit == 0 ? 1 : -1; }

inline constexpr double kSqrtHalf = 0.70710678118654752440;
// Inputs this close to the lower endpoint are snapped onto it, so that
// decimal spellings of 1/sqrt(2) behave as the degenerate point.
inline constexpr double kBoundarySnap = 1e-6;

template <class T>
struct UParam {
    T u;             // in (1/sqrt(2), 1]
    T v;             // sqrt(1 - u^2)
    T s;             // u^2
    T w3;            // u^3 v^3
    bool pythagorean = false;

    T v_sq() const { return T(1) - s; }
    T delta() const { return T(2) * s - T(1); } // u^2 - v^2
    T e_abc() const { return T(8) * w3; }       // 8 u^3 v^3
};

inline UParam<double> make_uparam(double u) {
    if (std::fabs(u - kSqrtHalf) <= kBoundarySnap)
        u = kSqrtHalf;
    if (!(u >= kSqrtHalf) || u > 1.0 + 1e-12)
        throw InvalidParameter("u must lie in (1/sqrt(2), 1], got " +
                               Scalar<double>::str(u));
    if (u > 1.0)
        u = 1.0;
    UParam<double> p;
    p.u = u;
    p.s = u * u;
    p.v = std::sqrt(std::max(0.0, 1.0 - p.s));
    const double uv = u * p.v;
    p.w3 = uv * uv * uv;
    return p;
}

// The boundary point u = 1/sqrt(2), admitted for degenerate-case work.
inline UParam<double> uparam_boundary() { return make_uparam(kSqrtHalf); }

// Exact mode needs u = p/r with p^2 + q^2 = r^2, so that u, v and
// u^3 v^3 are all rational.
inline bool pythagorean_ratio(const Rational& u, Rational* v_out = nullptr) {
    const mpz_class p = u.get_num(), r = u.get_den();
    mpz_class q;
    if (!is_perfect_square(r * r - p * p, &q))
        return false;
    if (v_out) {
        Rational v(q, r);
        v.canonicalize();
        *v_out = v;
    }
    return true;
}

inline UParam<Rational> make_uparam_exact(const Rational& u_in) {
    Rational u = u_in;
    u.canonicalize();
    if (sgn(u) <= 0 || u > 1)
        throw InvalidParameter("u must lie in (1/sqrt(2), 1]");
    const Rational usq = u * u;
    if (!(2 * usq > 1))
        throw InvalidParameter("u must exceed 1/sqrt(2); " + u.get_str() +
                               " does not (use float mode near the boundary)");
    Rational v;
    if (!pythagorean_ratio(u, &v))
        throw InvalidParameter("exact mode requires a Pythagorean ratio u = p/r "
                               "with p^2 + q^2 = r^2; got " + u.get_str());
    UParam<Rational> p;
    p.u = u;
    p.v = v;
    p.s = usq;
    p.w3 = usq * u * v * v * v;
    p.pythagorean = true;
    return p;
}

// Four-outcome alphabet of the unreduced distribution.
enum class Outcome4 : int { Zero = 0, OnePlus = 1, OneMinus = 2, Two = 3 };

inline Outcome4 one_outcome(int pm) {
    return pm == 1 ? Outcome4::OnePlus : Outcome4::OneMinus;
}

template <class T>
struct FourOutcomeDist {
    std::array<T, 64> p{}; // index 16*a + 4*b + c

    static int idx(Outcome4 a, Outcome4 b, Outcome4 c) {
        return 16 * static_cast<int>(a) + 4 * static_cast<int>(b) +
               static_cast<int>(c);
    }
    T& at(Outcome4 a, Outcome4 b, Outcome4 c) { return p[idx(a, b, c)]; }
    const T& at(Outcome4 a, Outcome4 b, Outcome4 c) const { return p[idx(a, b, c)]; }

    T total() const {
        T s(0);
        for (const auto& x : p) s += x;
        return s;
    }
};

template <class T>
struct CorrelatorPoint {
    T f_ab, f_bc, f_ac, f_abc;
};

template <class T>
CorrelatorPoint<T> correlator_origin() {
    return CorrelatorPoint<T>{T(0), T(0), T(0), T(0)};
}

// Marginals of q fixed by the four-outcome distribution.
template <class T>
struct FixedCorrelators {
    T e_a;   // E_A = E_B = E_C
    T f;     // F (token bias)
    T f_a;   // F_A = F_B = F_C
    T e_ab;  // E_AB = E_BC = E_AC
    T e_abc; // E_ABC
};

// 16-entry joint over (i,j,k,t), each in {-1,+1}.
template <class T>
struct BinaryDist4 {
    std::array<T, 16> p{};

    static int idx(int i, int j, int k, int t) {
        return (bit_of(i) << 3) | (bit_of(j) << 2) | (bit_of(k) << 1) | bit_of(t);
    }
    T& at(int i, int j, int k, int t) { return p[idx(i, j, k, t)]; }
    const T& at(int i, int j, int k, int t) const { return p[idx(i, j, k, t)]; }

    T total() const {
        T s(0);
        for (const auto& x : p) s += x;
        return s;
    }
};

// 8-entry distribution over (i,j,k); t_label records which conditional
// it is (0 when not a conditional).
template <class T>
struct BinaryDist3 {
    std::array<T, 8> p{};
    int t_label = 0;

    static int idx(int i, int j, int k) {
        return (bit_of(i) << 2) | (bit_of(j) << 1) | bit_of(k);
    }
    T& at(int i, int j, int k) { return p[idx(i, j, k)]; }
    const T& at(int i, int j, int k) const { return p[idx(i, j, k)]; }

    T total() const {
        T s(0);
        for (const auto& x : p) s += x;
        return s;
    }
    // single-party marginals of the +1 outcome
    T marginal_a() const { return p[0] + p[1] + p[2] + p[3]; }
    T marginal_b() const { return p[0] + p[1] + p[4] + p[5]; }
    T marginal_c() const { return p[0] + p[2] + p[4] + p[6]; }
};

namespace detail {
template <class T>
void set_cyclic(FourOutcomeDist<T>& P, Outcome4 a, Outcome4 b, Outcome4 c,
                const T& val) {
    P.at(a, b, c) = val;
    P.at(b, c, a) = val;
    P.at(c, a, b) = val;
}
} // namespace detail

// The four-outcome family.  Support:
//   P(0,1-,2) = P(0,2,1+) = u^2/8
//   P(0,1+,2) = P(0,2,1-) = v^2/8
//   P(1j,1j,1j)           = (v^3 + j u^3)^2 / 8
//   P(1j,1j,1k), k = -j   = u^2 v^2 (u + k v)^2 / 8
// plus cyclic permutations of the parties; all else zero.
template <class T>
FourOutcomeDist<T> eval_P(const UParam<T>& up) {
    using O = Outcome4;
    FourOutcomeDist<T> P;
    const T u = up.u, v = up.v;
    const T u2 = up.s, v2 = up.v_sq();
    const T u3 = u2 * u, v3 = v2 * v;
    const T cu = u2 / 8, cv = v2 / 8;

    detail::set_cyclic(P, O::Zero, O::OneMinus, O::Two, cu);
    detail::set_cyclic(P, O::Zero, O::Two, O::OnePlus, cu);
    detail::set_cyclic(P, O::Zero, O::OnePlus, O::Two, cv);
    detail::set_cyclic(P, O::Zero, O::Two, O::OneMinus, cv);

    for (int j : {+1, -1}) {
        const T amp = (j == 1) ? T(v3 + u3) : T(v3 - u3);
        P.at(one_outcome(j), one_outcome(j), one_outcome(j)) = amp * amp / 8;
    }
    for (int j : {+1, -1}) {
        const int k = -j;
        const T amp = (k == 1) ? T(u + v) : T(u - v);
        const T val = u2 * v2 * amp * amp / 8;
        detail::set_cyclic(P, one_outcome(j), one_outcome(j), one_outcome(k), val);
    }
    return P;
}

// q_u(i,j,k,t) for a given correlator point.  Entries may be negative:
// callers probe points outside the feasibility polytope on purpose.
template <class T>
BinaryDist4<T> eval_q(const UParam<T>& up, const CorrelatorPoint<T>& F) {
    BinaryDist4<T> q;
    const T d = up.delta();
    const T d2 = d * d;
    const T w8 = up.e_abc();
    for (int i : {+1, -1})
        for (int j : {+1, -1})
            for (int k : {+1, -1})
                for (int t : {+1, -1}) {
                    const int ij = i * j, jk = j * k, ki = k * i;
                    const int ijk = ij * k;
                    T val = T(1);
                    val += d2 * (ij + jk + ki);
                    val += d * ((i + j + k) * t);
                    val += w8 * ijk;
                    val += T(t * ij) * F.f_ab + T(t * jk) * F.f_bc +
                           T(t * ki) * F.f_ac;
                    val += T(ijk * t) * F.f_abc;
                    q.at(i, j, k, t) = val / 16;
                }
    return q;
}

template <class T>
FixedCorrelators<T> fixed_correlators(const UParam<T>& up) {
    FixedCorrelators<T> f;
    f.e_a = T(0);
    f.f = T(0);
    f.f_a = up.delta();
    f.e_ab = up.delta() * up.delta();
    f.e_abc = up.e_abc();
    return f;
}

// Conditional q^t(i,j,k) = 2 q(i,j,k,t).  Requires the slice to be
// nonnegative; a negative entry means F is outside the polytope.
template <class T>
BinaryDist3<T> condition_q(const BinaryDist4<T>& q, int t) {
    if (t != 1 && t != -1)
        throw InvalidParameter("t must be +1 or -1");
    BinaryDist3<T> out;
    out.t_label = t;
    for (int i : {+1, -1})
        for (int j : {+1, -1})
            for (int k : {+1, -1}) {
                const T& e = q.at(i, j, k, t);
                if (!Scalar<T>::nonneg(e))
                    throw NegativeConditional(
                        "q(" + std::to_string(i) + "," + std::to_string(j) + "," +
                        std::to_string(k) + ",t=" + std::to_string(t) +
                        ") = " + Scalar<T>::str(e) + " < 0");
                T val = e + e;
                if constexpr (!Scalar<T>::exact) {
                    if (val < 0) val = 0;
                }
                out.at(i, j, k) = val;
            }
    return out;
}

// Marginal-consistency checks between q(i,j,k,t) and P(a,b,c):
//  (a) (1/4) [q(i,j,k,+1) + q(i,j,k,-1)] = P(1_i, 1_j, 1_k)
//  (b) (1/4) q_A(i, t=+1) = P(1_i, 0, 2),  (1/4) q_A(i, t=-1) = P(1_i, 2, 0)
//      and the cyclic analogues for B and C
//  (c) q(t=+1) = q(t=-1) = 1/2
struct ConsistencyEntry {
    std::string relation;
    double lhs, rhs;
    bool pass;
};

struct ConsistencyReport {
    std::vector<ConsistencyEntry> entries;
    bool all_pass = true;
    double max_residual = 0.0;

    void add(const std::string& name, double lhs, double rhs, bool ok) {
        entries.push_back({name, lhs, rhs, ok});
        all_pass = all_pass && ok;
        max_residual = std::max(max_residual, std::fabs(lhs - rhs));
    }
};

template <class T>
ConsistencyReport check_consistency(const BinaryDist4<T>& q,
                                    const FourOutcomeDist<T>& P) {
    using O = Outcome4;
    ConsistencyReport rep;
    const auto record = [&rep](const std::string& name, const T& lhs, const T& rhs) {
        rep.add(name, Scalar<T>::to_double(lhs), Scalar<T>::to_double(rhs),
                Scalar<T>::equal(lhs, rhs));
    };

    for (int i : {+1, -1})
        for (int j : {+1, -1})
            for (int k : {+1, -1}) {
                const T lhs = (q.at(i, j, k, +1) + q.at(i, j, k, -1)) / 4;
                const T rhs = P.at(one_outcome(i), one_outcome(j), one_outcome(k));
                record("three-party i=" + std::to_string(i) + " j=" +
                           std::to_string(j) + " k=" + std::to_string(k),
                       lhs, rhs);
            }

    for (int t : {+1, -1})
        for (int x : {+1, -1}) {
            T qa(0), qb(0), qc(0);
            for (int y : {+1, -1})
                for (int z : {+1, -1}) {
                    qa += q.at(x, y, z, t);
                    qb += q.at(y, x, z, t);
                    qc += q.at(y, z, x, t);
                }
            const O ox = one_outcome(x);
            const T pa = (t == 1) ? P.at(ox, O::Zero, O::Two) : P.at(ox, O::Two, O::Zero);
            const T pb = (t == 1) ? P.at(O::Two, ox, O::Zero) : P.at(O::Zero, ox, O::Two);
            const T pc = (t == 1) ? P.at(O::Zero, O::Two, ox) : P.at(O::Two, O::Zero, ox);
            const std::string suffix =
                "=" + std::to_string(x) + " t=" + std::to_string(t);
            record("single-party A i" + suffix, qa / 4, pa);
            record("single-party B j" + suffix, qb / 4, pb);
            record("single-party C k" + suffix, qc / 4, pc);
        }

    for (int t : {+1, -1}) {
        T mass(0);
        for (int i : {+1, -1})
            for (int j : {+1, -1})
                for (int k : {+1, -1})
                    mass += q.at(i, j, k, t);
        record("token-balance t=" + std::to_string(t), mass, T(1) / 2);
    }
    return rep;
}

} // namespace inflacert::family
