#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "inflacert/family.hpp"

// Builder for the doubled-network ("web") linear program.  Twelve
// party copies with binary outcomes give 2^12 raw variables; the three
// independent source-copy swaps generate an 8-element symmetry group.
// By default variables are collapsed to orbit masses, which keeps the
// domain a probability simplex; the raw formulation with explicit
// symmetry rows is available behind an option for format tests.

namespace inflacert::inflation {

using family::BinaryDist3;

enum class Party { A = 0, B = 1, C = 2 };

inline constexpr int kParties = 12;
inline constexpr int kOutcomes = 4096;

// Fixed global order: A11,A12,A21,A22,B11,B12,B21,B22,C11,C12,C21,C22.
// copies are 1-based (first, second); for A the pair is (beta-copy,
// gamma-copy), for B (gamma-copy, alpha-copy), for C (alpha-copy,
// beta-copy).
inline constexpr int position(Party p, int first, int second) {
    return static_cast<int>(p) * 4 + (first - 1) * 2 + (second - 1);
}
inline constexpr int bit_shift(int pos) { return 11 - pos; }
inline constexpr unsigned bit_mask(int pos) { return 1u << bit_shift(pos); }
inline constexpr int bit_at(unsigned idx, int pos) {
    return (idx >> bit_shift(pos)) & 1;
}

inline std::string party_name(Party p) {
    switch (p) {
    case Party::A: return "A";
    case Party::B: return "B";
    default: return "C";
    }
}

// Group element id: bit 0 swaps the beta copies, bit 1 the gamma
// copies, bit 2 the alpha copies.
struct OrbitTable {
    std::array<std::array<uint16_t, kOutcomes>, 8> image;
    std::array<uint16_t, kOutcomes> orbit_of;
    std::vector<uint16_t> representative;
    std::vector<uint8_t> orbit_size;

    std::size_t n_orbits() const { return representative.size(); }

    static const OrbitTable& get() {
        static const OrbitTable table = build();
        return table;
    }

  private:
    static OrbitTable build() {
        OrbitTable t;
        std::array<std::array<int, kParties>, 8> pos_map{};
        for (int g = 0; g < 8; ++g) {
            const bool swap_beta = g & 1, swap_gamma = g & 2, swap_alpha = g & 4;
            const auto sw = [](bool s, int copy) { return s ? 3 - copy : copy; };
            for (int first = 1; first <= 2; ++first)
                for (int second = 1; second <= 2; ++second) {
                    pos_map[g][position(Party::A, first, second)] = position(
                        Party::A, sw(swap_beta, first), sw(swap_gamma, second));
                    pos_map[g][position(Party::B, first, second)] = position(
                        Party::B, sw(swap_gamma, first), sw(swap_alpha, second));
                    pos_map[g][position(Party::C, first, second)] = position(
                        Party::C, sw(swap_alpha, first), sw(swap_beta, second));
                }
        }
        for (int g = 0; g < 8; ++g)
            for (unsigned idx = 0; idx < kOutcomes; ++idx) {
                unsigned img = 0;
                for (int pos = 0; pos < kParties; ++pos)
                    if (bit_at(idx, pos))
                        img |= bit_mask(pos_map[g][pos]);
                t.image[g][idx] = static_cast<uint16_t>(img);
            }
        std::array<bool, kOutcomes> seen{};
        for (unsigned idx = 0; idx < kOutcomes; ++idx) {
            if (seen[idx])
                continue;
            const uint16_t orbit_id = static_cast<uint16_t>(t.representative.size());
            int size = 0;
            for (int g = 0; g < 8; ++g) {
                const uint16_t img = t.image[g][idx];
                if (!seen[img]) {
                    seen[img] = true;
                    t.orbit_of[img] = orbit_id;
                    ++size;
                }
            }
            t.representative.push_back(static_cast<uint16_t>(idx));
            t.orbit_size.push_back(static_cast<uint8_t>(size));
        }
        return t;
    }
};

inline const OrbitTable& orbit_decomposition() { return OrbitTable::get(); }

struct ConstraintOptions {
    bool hierarchy = true;
    bool higher_degree = true;
    bool lpi = true;
    bool collapse_orbits = true;

    bool operator==(const ConstraintOptions&) const = default;

    std::string str() const {
        std::string s = "hierarchy=";
        s += hierarchy ? '1' : '0';
        s += ",hd=";
        s += higher_degree ? '1' : '0';
        s += ",lpi=";
        s += lpi ? '1' : '0';
        s += ",vars=";
        s += collapse_orbits ? "orbits" : "raw";
        return s;
    }

    static ConstraintOptions parse(const std::string& text) {
        ConstraintOptions o;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find(',', start);
            if (end == std::string::npos)
                end = text.size();
            const std::string item = text.substr(start, end - start);
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw ParseError("bad options item '" + item + "'");
            const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
            if (key == "hierarchy") o.hierarchy = (val == "1");
            else if (key == "hd") o.higher_degree = (val == "1");
            else if (key == "lpi") o.lpi = (val == "1");
            else if (key == "vars") {
                if (val != "orbits" && val != "raw")
                    throw ParseError("bad vars value '" + val + "'");
                o.collapse_orbits = (val == "orbits");
            } else
                throw ParseError("unknown options key '" + key + "'");
            start = end + 1;
            if (end == text.size())
                break;
        }
        return o;
    }
};

enum class RowKind { Symmetry, Hierarchy, HigherDegree, Lpi };

template <class T>
struct Row {
    std::string label;
    RowKind kind;
    std::vector<std::pair<uint32_t, T>> coeffs; // sorted by column
    T rhs{};

    // generating data, for certificate export and coverage
    uint8_t hier_v1 = 0, hier_v2 = 0; // 3-bit (i,j,k) entry indices
    uint8_t hd_bits = 0;              // (a12,b12,c12)
    int lpi_party = -1;
    int lpi_bit = 0;
    // lpi only: coeffs = base_counts - marg(party,bit) * factored_counts
    std::vector<std::pair<uint32_t, T>> base_counts;
    std::vector<std::pair<uint32_t, T>> factored_counts;
};

template <class T>
struct InflationProblem {
    ConstraintOptions options;
    std::size_t n_cols = 0;
    std::vector<Row<T>> rows;
    BinaryDist3<T> source;
    // marg[party][bit]: single-party marginal of the encoded outcome
    std::array<std::array<T, 2>, 3> marg;
};

namespace detail {

inline std::string bits_label(unsigned value, int n) {
    std::string s(n, '0');
    for (int i = 0; i < n; ++i)
        if (value & (1u << (n - 1 - i)))
            s[i] = '1';
    return s;
}

// Sparse column weights of the marginal that fixes `fixed_vals` on the
// positions in `fixed_mask` and sums the rest.  Collapsed mode weights
// each raw outcome by 1/|orbit| (mass variables).
template <class T>
std::vector<std::pair<uint32_t, T>> marginal_weights(unsigned fixed_mask,
                                                     unsigned fixed_vals,
                                                     bool collapsed) {
    const auto& orbits = OrbitTable::get();
    std::map<uint32_t, T> acc;
    const unsigned free_mask = ~fixed_mask & 0xFFFu;
    unsigned sub = 0;
    while (true) {
        const unsigned idx = fixed_vals | sub;
        if (collapsed) {
            const uint16_t orb = orbits.orbit_of[idx];
            acc.emplace(orb, T(0)).first->second +=
                T(1) / int(orbits.orbit_size[orb]);
        } else {
            acc.emplace(idx, T(0)).first->second += T(1);
        }
        if (sub == free_mask)
            break;
        sub = (sub - free_mask) & free_mask; // next subset of free_mask
    }
    return {acc.begin(), acc.end()};
}

template <class T>
std::vector<std::pair<uint32_t, T>> combine_lpi(
    const std::vector<std::pair<uint32_t, T>>& base,
    const std::vector<std::pair<uint32_t, T>>& factored, const T& c) {
    std::map<uint32_t, T> acc(base.begin(), base.end());
    for (const auto& [col, w] : factored)
        acc.emplace(col, T(0)).first->second -= c * w;
    std::vector<std::pair<uint32_t, T>> out;
    out.reserve(acc.size());
    for (auto& [col, w] : acc)
        if (!Scalar<T>::is_zero(w))
            out.emplace_back(col, w);
    return out;
}

} // namespace detail

// Assembles the constraint system for a tested distribution q.  Row
// order is deterministic: symmetry (raw mode only), hierarchy,
// higher-degree, then the three LPI families.  Nonnegativity and
// normalization of the variables are domain conditions handled by the
// solver, not rows.
template <class T>
InflationProblem<T> build_inflation_lp(const BinaryDist3<T>& q,
                                       const ConstraintOptions& options = {}) {
    if (!Scalar<T>::equal(q.total(), T(1)))
        throw InvalidParameter("tested distribution must be normalized");
    const auto& orbits = OrbitTable::get();
    InflationProblem<T> prob;
    prob.options = options;
    prob.source = q;
    prob.n_cols = options.collapse_orbits ? orbits.n_orbits() : kOutcomes;

    prob.marg[0] = {q.marginal_a(), T(1) - q.marginal_a()};
    prob.marg[1] = {q.marginal_b(), T(1) - q.marginal_b()};
    prob.marg[2] = {q.marginal_c(), T(1) - q.marginal_c()};

    const bool collapsed = options.collapse_orbits;

    if (!collapsed) {
        // one equality per unordered pair {o, g(o)}, first group element wins
        std::map<std::pair<uint16_t, uint16_t>, int> pairs;
        for (int g = 1; g < 8; ++g)
            for (unsigned idx = 0; idx < kOutcomes; ++idx) {
                const uint16_t img = orbits.image[g][idx];
                if (img == idx)
                    continue;
                const uint16_t lo = std::min(static_cast<uint16_t>(idx), img);
                const uint16_t hi = std::max(static_cast<uint16_t>(idx), img);
                pairs.emplace(std::make_pair(lo, hi), g);
            }
        for (const auto& [key, g] : pairs) {
            Row<T> row;
            row.kind = RowKind::Symmetry;
            row.label = "sym:" + std::to_string(g) + ":" + std::to_string(key.first);
            row.coeffs = {{key.first, T(-1)}, {key.second, T(1)}};
            row.rhs = T(0);
            prob.rows.push_back(std::move(row));
        }
    }

    if (options.hierarchy) {
        const unsigned mask = bit_mask(position(Party::A, 1, 1)) |
                              bit_mask(position(Party::A, 2, 2)) |
                              bit_mask(position(Party::B, 1, 1)) |
                              bit_mask(position(Party::B, 2, 2)) |
                              bit_mask(position(Party::C, 1, 1)) |
                              bit_mask(position(Party::C, 2, 2));
        for (unsigned n = 0; n < 64; ++n) {
            const int a11 = (n >> 5) & 1, a22 = (n >> 4) & 1, b11 = (n >> 3) & 1,
                      b22 = (n >> 2) & 1, c11 = (n >> 1) & 1, c22 = n & 1;
            unsigned vals = 0;
            if (a11) vals |= bit_mask(position(Party::A, 1, 1));
            if (a22) vals |= bit_mask(position(Party::A, 2, 2));
            if (b11) vals |= bit_mask(position(Party::B, 1, 1));
            if (b22) vals |= bit_mask(position(Party::B, 2, 2));
            if (c11) vals |= bit_mask(position(Party::C, 1, 1));
            if (c22) vals |= bit_mask(position(Party::C, 2, 2));
            Row<T> row;
            row.kind = RowKind::Hierarchy;
            row.label = "hier:" + detail::bits_label(n, 6);
            row.coeffs = detail::marginal_weights<T>(mask, vals, collapsed);
            row.hier_v1 = static_cast<uint8_t>((a11 << 2) | (b11 << 1) | c11);
            row.hier_v2 = static_cast<uint8_t>((a22 << 2) | (b22 << 1) | c22);
            row.rhs = q.p[row.hier_v1] * q.p[row.hier_v2];
            prob.rows.push_back(std::move(row));
        }
    }

    if (options.higher_degree) {
        const unsigned mask = bit_mask(position(Party::A, 1, 2)) |
                              bit_mask(position(Party::B, 1, 2)) |
                              bit_mask(position(Party::C, 1, 2));
        for (unsigned n = 0; n < 8; ++n) {
            const int a12 = (n >> 2) & 1, b12 = (n >> 1) & 1, c12 = n & 1;
            unsigned vals = 0;
            if (a12) vals |= bit_mask(position(Party::A, 1, 2));
            if (b12) vals |= bit_mask(position(Party::B, 1, 2));
            if (c12) vals |= bit_mask(position(Party::C, 1, 2));
            Row<T> row;
            row.kind = RowKind::HigherDegree;
            row.label = "hd:" + detail::bits_label(n, 3);
            row.coeffs = detail::marginal_weights<T>(mask, vals, collapsed);
            row.hd_bits = static_cast<uint8_t>(n);
            row.rhs = prob.marg[0][a12] * prob.marg[1][b12] * prob.marg[2][c12];
            prob.rows.push_back(std::move(row));
        }
    }

    if (options.lpi) {
        // per party: the six kept positions of the larger marginal, the
        // first being the factored copy (both of whose sources are
        // absent from the rest of the kept set)
        struct LpiSpec {
            Party party;
            std::array<int, 6> kept;
        };
        const std::array<LpiSpec, 3> specs = {{
            {Party::A,
             {position(Party::A, 1, 1), position(Party::A, 2, 2),
              position(Party::B, 2, 1), position(Party::B, 2, 2),
              position(Party::C, 1, 2), position(Party::C, 2, 2)}},
            {Party::B,
             {position(Party::B, 1, 1), position(Party::B, 2, 2),
              position(Party::C, 2, 1), position(Party::C, 2, 2),
              position(Party::A, 1, 2), position(Party::A, 2, 2)}},
            {Party::C,
             {position(Party::C, 1, 1), position(Party::C, 2, 2),
              position(Party::A, 2, 1), position(Party::A, 2, 2),
              position(Party::B, 1, 2), position(Party::B, 2, 2)}},
        }};
        for (const auto& spec : specs) {
            unsigned mask1 = 0;
            for (const int pos : spec.kept)
                mask1 |= bit_mask(pos);
            const unsigned mask2 = mask1 & ~bit_mask(spec.kept[0]);
            for (unsigned n = 0; n < 64; ++n) {
                unsigned vals = 0;
                for (int i = 0; i < 6; ++i)
                    if (n & (1u << (5 - i)))
                        vals |= bit_mask(spec.kept[i]);
                Row<T> row;
                row.kind = RowKind::Lpi;
                row.label = "lpi:" + party_name(spec.party) + ":" +
                            detail::bits_label(n, 6);
                row.lpi_party = static_cast<int>(spec.party);
                row.lpi_bit = (n >> 5) & 1;
                row.base_counts = detail::marginal_weights<T>(mask1, vals, collapsed);
                row.factored_counts = detail::marginal_weights<T>(
                    mask2, vals & ~bit_mask(spec.kept[0]), collapsed);
                row.coeffs = detail::combine_lpi(
                    row.base_counts, row.factored_counts,
                    prob.marg[row.lpi_party][row.lpi_bit]);
                row.rhs = T(0);
                prob.rows.push_back(std::move(row));
            }
        }
    }
    return prob;
}

// Orbit masses of a raw 4096-entry distribution.
template <class T>
std::vector<T> collapse_to_orbits(const std::vector<T>& raw) {
    const auto& orbits = OrbitTable::get();
    std::vector<T> out(orbits.n_orbits(), T(0));
    for (unsigned idx = 0; idx < kOutcomes; ++idx)
        out[orbits.orbit_of[idx]] += raw[idx];
    return out;
}

// Largest row residual |A x - rhs| of a candidate solution, as a
// feasibility diagnostic.
template <class T>
T max_row_residual(const InflationProblem<T>& prob, const std::vector<T>& x) {
    T worst(0);
    for (const auto& row : prob.rows) {
        T acc = -row.rhs;
        for (const auto& [col, w] : row.coeffs)
            acc += w * x[col];
        const T mag = Scalar<T>::abs(acc);
        if (Scalar<T>::to_double(mag) > Scalar<T>::to_double(worst))
            worst = mag;
    }
    return worst;
}

} // namespace inflacert::inflation
