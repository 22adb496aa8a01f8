#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "inflacert/lpcore.hpp"
#include "inflacert/polytope.hpp"
#include "support.hpp"

using namespace inflacert;
using namespace inflacert::family;
using namespace inflacert::polytope;

namespace {

// Convex-hull membership via the simplex core: F in conv(V) iff
// lambda >= 0, sum lambda = 1, V lambda = F is feasible.
bool hull_member(const std::vector<CorrelatorPoint<double>>& verts,
                 const CorrelatorPoint<double>& F, double tol) {
    const std::size_t n = verts.size();
    std::vector<std::vector<std::pair<uint32_t, double>>> rows(4);
    std::vector<double> rhs = {F.f_ab, F.f_bc, F.f_ac, F.f_abc};
    for (uint32_t j = 0; j < n; ++j) {
        rows[0].emplace_back(j, verts[j].f_ab);
        rows[1].emplace_back(j, verts[j].f_bc);
        rows[2].emplace_back(j, verts[j].f_ac);
        rows[3].emplace_back(j, verts[j].f_abc);
    }
    std::vector<std::pair<uint32_t, double>> norm;
    for (uint32_t j = 0; j < n; ++j)
        norm.emplace_back(j, 1.0);
    rows.push_back(norm);
    rhs.push_back(1.0);
    const auto out = lpcore::detail::phase_one<double>(n, rows, rhs);
    return out.objective < tol;
}

} // namespace

TEST_CASE("rows reproduce 16*q coefficientwise, exactly") {
    std::mt19937_64 rng(42);
    const auto params = testsupport::pythagorean_params();
    std::uniform_int_distribution<long> num(-8, 8);
    for (const auto& u : params) {
        const auto up = make_uparam_exact(u);
        const auto poly = build_polytope(up);
        const auto q_of = [&up](const CorrelatorPoint<Rational>& F) {
            return eval_q(up, F);
        };
        const CorrelatorPoint<Rational> F{make_rational(num(rng), 8),
                                          make_rational(num(rng), 8),
                                          make_rational(num(rng), 8),
                                          make_rational(num(rng), 8)};
        const auto q = q_of(F);
        Rational row_sum(0);
        for (const auto& row : poly.halfspaces.rows) {
            const auto tuple = row.outcome_tuple();
            CHECK(row.value(F) ==
                  16 * q.at(tuple[0], tuple[1], tuple[2], tuple[3]));
            row_sum += row.value(F);
        }
        // all sixteen left sides sum to 16 identically
        CHECK(row_sum == 16);
    }
}

TEST_CASE("all sixteen sign patterns appear exactly once") {
    const auto poly = build_polytope(make_uparam(0.8));
    std::set<std::array<int, 4>> tuples;
    for (const auto& row : poly.halfspaces.rows)
        tuples.insert(row.outcome_tuple());
    CHECK(tuples.size() == 16);
}

TEST_CASE("degenerate point: a single vertex at the origin") {
    const auto up = uparam_boundary();
    const auto verts = enumerate_vertices(build_polytope(up));
    REQUIRE(verts.size() == 1);
    CHECK(std::fabs(verts[0].f_ab) <= 1e-9);
    CHECK(std::fabs(verts[0].f_bc) <= 1e-9);
    CHECK(std::fabs(verts[0].f_ac) <= 1e-9);
    CHECK(std::fabs(verts[0].f_abc) <= 1e-9);
}

TEST_CASE("emptiness against the closed-form threshold") {
    CHECK_FALSE(is_empty(make_uparam(0.8860)));
    CHECK(is_empty(make_uparam(0.8865)));
    CHECK(is_empty(make_uparam(0.95)));
    CHECK_FALSE(is_empty(uparam_boundary()));
    CHECK_FALSE(is_empty(make_uparam(0.8101)));
    // monotone at the top of the range
    bool empty_seen = false;
    for (const double u : {0.88, 0.887, 0.9, 0.95, 0.99}) {
        const bool e = is_empty(make_uparam(u));
        if (empty_seen)
            CHECK(e);
        empty_seen = empty_seen || e;
    }
    CHECK(empty_seen);
}

TEST_CASE("vertex activity and membership") {
    for (const double uval : {0.78, 0.8, 0.8090, 0.84}) {
        const auto up = make_uparam(uval);
        const auto poly = build_polytope(up);
        const auto verts = enumerate_vertices(poly);
        REQUIRE(!verts.empty());
        for (const auto& v : verts) {
            CHECK(contains(poly, v));
            CHECK(active_row_count(poly, v) >= 4);
        }
    }
    // exact mode: activity is exact too
    const auto up = make_uparam_exact(make_rational(4, 5));
    const auto poly = build_polytope(up);
    const auto verts = enumerate_vertices(poly);
    REQUIRE(!verts.empty());
    for (const auto& v : verts) {
        int active = 0;
        for (const auto& row : poly.halfspaces.rows) {
            const Rational val = row.value(v);
            CHECK(sgn(val) >= 0);
            if (sgn(val) == 0)
                ++active;
        }
        CHECK(active >= 4);
    }
}

TEST_CASE("reference vertex") {
    const auto up = make_uparam(0.8);
    const auto F = qplus_vertex(up);
    CHECK(F.f_ab == doctest::Approx(0.2016).epsilon(1e-12));
    CHECK(F.f_bc == doctest::Approx(0.2016).epsilon(1e-12));
    CHECK(F.f_ac == doctest::Approx(0.2016).epsilon(1e-12));
    CHECK(F.f_abc == doctest::Approx(0.115264).epsilon(1e-12));

    // it is one of the enumerated vertices
    const auto poly = build_polytope(up);
    const auto verts = enumerate_vertices(poly);
    bool found = false;
    for (const auto& v : verts)
        found = found || (std::fabs(v.f_ab - F.f_ab) < 1e-9 &&
                          std::fabs(v.f_bc - F.f_bc) < 1e-9 &&
                          std::fabs(v.f_ac - F.f_ac) < 1e-9 &&
                          std::fabs(v.f_abc - F.f_abc) < 1e-9);
    CHECK(found);

    // boundary of its validity range: the vertex leaves the polytope at
    // u_c = (1/2) sqrt(1 + sqrt(3^(4/3)+3^(2/3)-5)
    //                  + sqrt(20/sqrt(3^(4/3)+3^(2/3)-5) - 10 - 3^(4/3) - 3^(2/3)))
    const double s = std::sqrt(std::pow(3.0, 4.0 / 3) + std::pow(3.0, 2.0 / 3) - 5);
    const double u_c =
        0.5 * std::sqrt(1 + s +
                        std::sqrt(20 / s - 10 - std::pow(3.0, 4.0 / 3) -
                                  std::pow(3.0, 2.0 / 3)));
    CHECK(u_c == doctest::Approx(0.8457).epsilon(2e-5));
    const auto member_at = [](double u) {
        const auto pp = make_uparam(u);
        return contains(build_polytope(pp), qplus_vertex_point(pp));
    };
    CHECK(member_at(0.8456));
    CHECK_FALSE(member_at(0.8458));
    double lo = 0.83, hi = 0.86;
    while (hi - lo > 1e-9) {
        const double mid = (lo + hi) / 2;
        (member_at(mid) ? lo : hi) = mid;
    }
    CHECK(lo == doctest::Approx(u_c).epsilon(1e-6));
    CHECK_THROWS_AS(qplus_vertex(make_uparam(0.87)), VertexOutsidePolytope);
    // outside, the four defining rows are not all nonnegative
    const auto up87 = make_uparam(0.87);
    const auto F87 = qplus_vertex_point(up87);
    const auto poly87 = build_polytope(up87);
    int neg = 0;
    for (const auto& row : poly87.halfspaces.rows)
        if (row.value(F87) < -1e-12)
            ++neg;
    CHECK(neg > 0);
}

TEST_CASE("membership at handpicked points") {
    const auto b = uparam_boundary();
    const auto pb = build_polytope(b);
    CHECK(contains(pb, correlator_origin<double>()));
    CHECK_FALSE(contains(pb, CorrelatorPoint<double>{0.1, 0.0, 0.0, 0.1}));

    const auto up = make_uparam(0.8090);
    const auto poly = build_polytope(up);
    const CorrelatorPoint<double> probe{0, 0, 0, 0.5};
    bool all_nonneg = true;
    for (const auto& row : poly.halfspaces.rows)
        all_nonneg = all_nonneg && row.value(probe) >= -1e-12;
    CHECK(contains(poly, probe) == all_nonneg);
}

TEST_CASE("membership agrees with convex-hull membership") {
    std::mt19937_64 rng(777);
    const auto up = make_uparam(0.8090);
    const auto poly = build_polytope(up);
    const auto verts = enumerate_vertices(poly);
    REQUIRE(verts.size() >= 2);
    // half the probes are box samples (mostly outside), half are random
    // mixtures of the vertices pushed outward by a random factor, which
    // lands on both sides of the boundary
    std::uniform_real_distribution<double> box(-0.6, 0.8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> stretch(0.2, 2.2);
    CorrelatorPoint<double> centroid{0, 0, 0, 0};
    for (const auto& v : verts) {
        centroid.f_ab += v.f_ab / double(verts.size());
        centroid.f_bc += v.f_bc / double(verts.size());
        centroid.f_ac += v.f_ac / double(verts.size());
        centroid.f_abc += v.f_abc / double(verts.size());
    }
    int inside = 0, outside = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        CorrelatorPoint<double> F;
        if (trial % 2 == 0) {
            F = {box(rng), box(rng), box(rng), box(rng)};
        } else {
            double wsum = 0;
            std::vector<double> w(verts.size());
            for (auto& x : w)
                wsum += (x = unit(rng));
            F = {0, 0, 0, 0};
            for (std::size_t j = 0; j < verts.size(); ++j) {
                F.f_ab += w[j] / wsum * verts[j].f_ab;
                F.f_bc += w[j] / wsum * verts[j].f_bc;
                F.f_ac += w[j] / wsum * verts[j].f_ac;
                F.f_abc += w[j] / wsum * verts[j].f_abc;
            }
            const double k = stretch(rng);
            F.f_ab = centroid.f_ab + k * (F.f_ab - centroid.f_ab);
            F.f_bc = centroid.f_bc + k * (F.f_bc - centroid.f_bc);
            F.f_ac = centroid.f_ac + k * (F.f_ac - centroid.f_ac);
            F.f_abc = centroid.f_abc + k * (F.f_abc - centroid.f_abc);
        }
        bool member = true;
        double closest = 1e9;
        for (const auto& row : poly.halfspaces.rows) {
            member = member && row.value(F) >= -1e-9;
            closest = std::min(closest, std::fabs(row.value(F)));
        }
        // skip points hugging the boundary, where the two oracles may
        // legitimately disagree at tolerance level
        if (closest < 1e-6)
            continue;
        CHECK(hull_member(verts, F, 1e-9) == member);
        (member ? inside : outside) += 1;
    }
    CHECK(inside > 100);
    CHECK(outside > 100);
}

TEST_CASE("slice polyline at u = 0.8090") {
    const auto up = make_uparam(0.8090);
    const auto poly = build_polytope(up);
    const auto pts = slice_f2f3(poly);
    REQUIRE(pts.size() >= 3);
    // every polyline point satisfies all sliced constraints
    for (const auto& p : pts)
        CHECK(contains(poly, CorrelatorPoint<double>{p[0], p[0], p[0], p[1]}));
    // the polygon has positive area (shoelace)
    double area = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % pts.size()];
        area += a[0] * b[1] - b[0] * a[1];
    }
    CHECK(std::fabs(area) / 2 > 1e-4);

    // shrinking toward the bottom of the range: a point at the boundary
    const auto degenerate = slice_f2f3(build_polytope(uparam_boundary()));
    REQUIRE(degenerate.size() == 1);
    CHECK(std::fabs(degenerate[0][0]) <= 1e-9);
    CHECK(std::fabs(degenerate[0][1]) <= 1e-9);

    // empty above the threshold
    CHECK(slice_f2f3(build_polytope(make_uparam(0.95))).empty());
}

TEST_CASE("exact vertices at u = 55/73 carry exact rational offsets") {
    const auto up = make_uparam_exact(make_rational(55, 73));
    const auto poly = build_polytope(up);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 73, 6);
    for (const auto& row : poly.halfspaces.rows) {
        // offsets are rationals with denominator dividing 73^6
        const Rational off = row.offset;
        mpz_class rem;
        mpz_mod(rem.get_mpz_t(), den.get_mpz_t(), off.get_den().get_mpz_t());
        CHECK(rem == 0);
    }
    const auto verts = enumerate_vertices(poly);
    REQUIRE(!verts.empty());
    const auto F = qplus_vertex(up);
    bool found = false;
    for (const auto& v : verts)
        found = found || (v.f_ab == F.f_ab && v.f_bc == F.f_bc &&
                          v.f_ac == F.f_ac && v.f_abc == F.f_abc);
    CHECK(found);
}
