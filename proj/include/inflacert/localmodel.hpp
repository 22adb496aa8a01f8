#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "inflacert/family.hpp"
#include "inflacert/polytope.hpp"

// Discrete triangle-local models: three independent finite hidden
// variables and per-party response tables.  Includes the reference
// model realizing the q^+ conditional at the reference vertex, and the
// duplicated-source distribution used as a feasibility oracle for the
// inflation program.

namespace inflacert::local {

using family::BinaryDist3;
using family::UParam;

inline constexpr std::size_t kMaxAlphabet = 8;

// Sources: alpha between B and C, beta between A and C, gamma between
// A and B.  Response tables give the probability of each +-1 outcome
// (index 0 <-> +1) given the two received hidden values:
//   A sees (beta, gamma), B sees (gamma, alpha), C sees (alpha, beta).
template <class T>
struct TriangleLocalModel {
    std::vector<T> mu_bc; // alpha
    std::vector<T> mu_ac; // beta
    std::vector<T> mu_ab; // gamma
    std::vector<std::array<T, 2>> resp_a; // [beta * n_gamma + gamma]
    std::vector<std::array<T, 2>> resp_b; // [gamma * n_alpha + alpha]
    std::vector<std::array<T, 2>> resp_c; // [alpha * n_beta + beta]

    std::size_t n_alpha() const { return mu_bc.size(); }
    std::size_t n_beta() const { return mu_ac.size(); }
    std::size_t n_gamma() const { return mu_ab.size(); }

    void validate() const {
        const auto check_dist = [](const std::vector<T>& mu, const char* name) {
            if (mu.empty() || mu.size() > kMaxAlphabet)
                throw InvalidParameter(std::string(name) +
                                       ": alphabet size must be in [1, 8]");
            T sum(0);
            for (const auto& x : mu) {
                if (!Scalar<T>::nonneg(x))
                    throw InvalidParameter(std::string(name) + ": negative weight");
                sum += x;
            }
            if (!Scalar<T>::equal(sum, T(1)))
                throw InvalidParameter(std::string(name) + ": weights must sum to 1");
        };
        check_dist(mu_bc, "mu_bc");
        check_dist(mu_ac, "mu_ac");
        check_dist(mu_ab, "mu_ab");
        const auto check_resp = [](const std::vector<std::array<T, 2>>& resp,
                                   std::size_t rows, const char* name) {
            if (resp.size() != rows)
                throw InvalidParameter(std::string(name) + ": wrong table size");
            for (const auto& cell : resp) {
                if (!Scalar<T>::nonneg(cell[0]) || !Scalar<T>::nonneg(cell[1]))
                    throw InvalidParameter(std::string(name) + ": negative response");
                if (!Scalar<T>::equal(cell[0] + cell[1], T(1)))
                    throw InvalidParameter(std::string(name) +
                                           ": response column must sum to 1");
            }
        };
        check_resp(resp_a, n_beta() * n_gamma(), "resp_a");
        check_resp(resp_b, n_gamma() * n_alpha(), "resp_b");
        check_resp(resp_c, n_alpha() * n_beta(), "resp_c");
    }

    const std::array<T, 2>& a_given(std::size_t beta, std::size_t gamma) const {
        return resp_a[beta * n_gamma() + gamma];
    }
    const std::array<T, 2>& b_given(std::size_t gamma, std::size_t alpha) const {
        return resp_b[gamma * n_alpha() + alpha];
    }
    const std::array<T, 2>& c_given(std::size_t alpha, std::size_t beta) const {
        return resp_c[alpha * n_beta() + beta];
    }
};

// P(a,b,c) = sum over hidden values of the product of source weights
// and the three response probabilities.
template <class T>
BinaryDist3<T> eval_local(const TriangleLocalModel<T>& m) {
    m.validate();
    BinaryDist3<T> out;
    for (std::size_t al = 0; al < m.n_alpha(); ++al)
        for (std::size_t be = 0; be < m.n_beta(); ++be)
            for (std::size_t ga = 0; ga < m.n_gamma(); ++ga) {
                const T w = m.mu_bc[al] * m.mu_ac[be] * m.mu_ab[ga];
                const auto& pa = m.a_given(be, ga);
                const auto& pb = m.b_given(ga, al);
                const auto& pc = m.c_given(al, be);
                for (int ab = 0; ab < 2; ++ab)
                    for (int bb = 0; bb < 2; ++bb)
                        for (int cb = 0; cb < 2; ++cb)
                            out.p[(ab << 2) | (bb << 1) | cb] +=
                                w * pa[ab] * pb[bb] * pc[cb];
            }
    return out;
}

namespace detail {
// Binary sources with weight p on value 1; each party answers +1 when
// its two received values are equal, -1 otherwise.  Realizes the q^+
// conditional at the reference vertex.
template <class T>
TriangleLocalModel<T> biased_match_model(const T& p) {
    TriangleLocalModel<T> m;
    const T q = T(1) - p;
    m.mu_bc = {q, p};
    m.mu_ac = {q, p};
    m.mu_ab = {q, p};
    const auto table = [] {
        std::vector<std::array<T, 2>> resp(4);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                // outcome +1 (index 0) iff x == y
                resp[x * 2 + y][0] = T(x == y ? 1 : 0);
                resp[x * 2 + y][1] = T(x == y ? 0 : 1);
            }
        return resp;
    };
    m.resp_a = table();
    m.resp_b = table();
    m.resp_c = table();
    return m;
}
} // namespace detail

// Validity: the reference vertex must belong to the polytope (true up
// to u ~ 0.8457); checked directly rather than via a closed form.
template <class T>
void check_reference_model_range(const UParam<T>& up) {
    if (!polytope::contains(polytope::build_polytope(up),
                            polytope::qplus_vertex_point(up)))
        throw OutOfValidityRange(
            "reference model is only valid while the reference vertex lies in "
            "the polytope; u = " + Scalar<T>::str(up.u) + " is outside");
}

inline TriangleLocalModel<double> qplus_reference_model(const UParam<double>& up) {
    check_reference_model_range(up);
    const double bias = (1.0 + std::sqrt(std::max(0.0, up.delta()))) / 2.0;
    return detail::biased_match_model(bias);
}

// Exact variant: the source bias (1 + sqrt(u^2-v^2))/2 is irrational
// even for Pythagorean u, so the model is carried in Q(sqrt(u^2-v^2));
// the evaluated distribution collapses back to rationals.
inline TriangleLocalModel<QuadExt> qplus_reference_model_exact(
    const UParam<Rational>& up) {
    check_reference_model_range(up);
    const Rational d = up.delta();
    const QuadExt bias(make_rational(1, 2), make_rational(1, 2), d);
    return detail::biased_match_model(bias);
}

// Joint distribution over the twelve duplicated parties obtained by
// wiring two independent copies of each source into the doubled
// network.  Raw 4096-entry layout; bit 11 is A11, bit 0 is C22, with
// party copies ordered A11,A12,A21,A22,B11,...,C22 and bit 0 <-> +1.
template <class T>
std::vector<T> inflation_witness_distribution(const TriangleLocalModel<T>& m) {
    m.validate();
    std::vector<T> p_inf(4096, T(0));
    const std::size_t na = m.n_alpha(), nb = m.n_beta(), ng = m.n_gamma();
    std::vector<T> buf, next;
    buf.reserve(4096);
    next.reserve(4096);
    for (std::size_t a1 = 0; a1 < na; ++a1)
        for (std::size_t a2 = 0; a2 < na; ++a2)
            for (std::size_t b1 = 0; b1 < nb; ++b1)
                for (std::size_t b2 = 0; b2 < nb; ++b2)
                    for (std::size_t g1 = 0; g1 < ng; ++g1)
                        for (std::size_t g2 = 0; g2 < ng; ++g2) {
                            const T w = m.mu_bc[a1] * m.mu_bc[a2] * m.mu_ac[b1] *
                                        m.mu_ac[b2] * m.mu_ab[g1] * m.mu_ab[g2];
                            if (Scalar<T>::is_zero(w))
                                continue;
                            const std::array<const std::array<T, 2>*, 12> cells = {
                                &m.a_given(b1, g1), &m.a_given(b1, g2),
                                &m.a_given(b2, g1), &m.a_given(b2, g2),
                                &m.b_given(g1, a1), &m.b_given(g1, a2),
                                &m.b_given(g2, a1), &m.b_given(g2, a2),
                                &m.c_given(a1, b1), &m.c_given(a1, b2),
                                &m.c_given(a2, b1), &m.c_given(a2, b2),
                            };
                            buf.assign(1, w);
                            for (const auto* cell : cells) {
                                next.assign(buf.size() * 2, T(0));
                                for (std::size_t i = 0; i < buf.size(); ++i) {
                                    next[2 * i] = buf[i] * (*cell)[0];
                                    next[2 * i + 1] = buf[i] * (*cell)[1];
                                }
                                buf.swap(next);
                            }
                            for (std::size_t i = 0; i < 4096; ++i)
                                p_inf[i] += buf[i];
                        }
    return p_inf;
}

} // namespace inflacert::local
