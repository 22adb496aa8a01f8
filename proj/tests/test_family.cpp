#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "inflacert/family.hpp"
#include "inflacert/polytope.hpp"
#include "support.hpp"

using namespace inflacert;
using namespace inflacert::family;
using testsupport::pythagorean_params;

namespace {

// Independent route for q: the general four-partite correlator
// expansion with the fixed marginals substituted, term by term.
template <class T>
T q_entry_oracle(const UParam<T>& up, const CorrelatorPoint<T>& F, int i, int j,
                 int k, int t) {
    const auto fc = fixed_correlators(up);
    T acc(1);
    acc += T(i) * fc.e_a + T(j) * fc.e_a + T(k) * fc.e_a;
    acc += T(t) * fc.f;
    acc += T(i * j) * fc.e_ab + T(j * k) * fc.e_ab + T(k * i) * fc.e_ab;
    acc += T(t) * (T(i) * fc.f_a + T(j) * fc.f_a + T(k) * fc.f_a);
    acc += T(i * j * k) * fc.e_abc;
    acc += T(t) * (T(i * j) * F.f_ab + T(j * k) * F.f_bc + T(k * i) * F.f_ac);
    acc += T(i * j * k * t) * F.f_abc;
    return acc / 16;
}

CorrelatorPoint<Rational> random_rational_point(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-8, 8);
    const auto pick = [&] { return make_rational(num(rng), 8); };
    return {pick(), pick(), pick(), pick()};
}

} // namespace

TEST_CASE("scalar parsing") {
    CHECK(rational_from_string("55/73") == make_rational(55, 73));
    CHECK(rational_from_string("0.8090") == make_rational(809, 1000));
    CHECK(rational_from_string("-.25") == make_rational(-1, 4));
    CHECK(rational_from_string("3") == 3);
    CHECK_THROWS_AS(rational_from_string("abc"), ParseError);
    CHECK_THROWS_AS(rational_from_string("1/0"), ParseError);
    CHECK_THROWS_AS(rational_from_string(""), ParseError);

    const double x = 0.1 + 0.2;
    CHECK(std::stod(Scalar<double>::str(x)) == x);
}

TEST_CASE("uparam construction and pythagorean detection") {
    const auto p = make_uparam_exact(make_rational(55, 73));
    CHECK(p.pythagorean);
    CHECK(p.v == make_rational(48, 73));
    CHECK(p.s == make_rational(3025, 5329));
    CHECK(p.u * p.u + p.v * p.v == 1);

    const auto one = make_uparam_exact(Rational(1));
    CHECK(one.pythagorean);
    CHECK(sgn(one.v) == 0);
    CHECK(one.w3 == 0);

    CHECK_THROWS_AS(make_uparam_exact(make_rational(809, 1000)), InvalidParameter);
    CHECK_THROWS_AS(make_uparam_exact(make_rational(3, 5)), InvalidParameter);
    CHECK_THROWS_AS(make_uparam(0.6), InvalidParameter);
    CHECK_THROWS_AS(make_uparam(1.1), InvalidParameter);

    // near-boundary inputs snap onto 1/sqrt(2)
    CHECK(make_uparam(0.7071067).u == doctest::Approx(kSqrtHalf).epsilon(1e-15));
    CHECK(make_uparam(0.7071068).u == doctest::Approx(kSqrtHalf).epsilon(1e-15));
    const auto b = uparam_boundary();
    CHECK(b.u * b.u == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("eval_P values at the degenerate point") {
    const auto up = uparam_boundary();
    const auto P = eval_P(up);
    using O = Outcome4;
    CHECK(P.at(O::Zero, O::OneMinus, O::Two) == doctest::Approx(1.0 / 16).epsilon(1e-14));
    CHECK(P.at(O::OneMinus, O::OneMinus, O::OneMinus) ==
          doctest::Approx(0.0).epsilon(1e-14));
    CHECK(P.total() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eval_P exact rational values at u = 55/73") {
    const auto up = make_uparam_exact(make_rational(55, 73));
    const auto P = eval_P(up);
    using O = Outcome4;
    CHECK(P.at(O::Zero, O::OneMinus, O::Two) == make_rational(3025, 42632));
    CHECK(P.at(O::Zero, O::OnePlus, O::Two) == make_rational(2304, 42632));
    CHECK(P.total() == 1);

    // cyclic invariance, exactly
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                const auto A = static_cast<O>(a), B = static_cast<O>(b),
                           C = static_cast<O>(c);
                CHECK(P.at(A, B, C) == P.at(B, C, A));
            }
}

TEST_CASE("eval_P support pattern and cyclic invariance for random u") {
    std::mt19937_64 rng(20260809);
    using O = Outcome4;
    for (int trial = 0; trial < 20; ++trial) {
        const auto up = make_uparam(testsupport::random_u(rng));
        const auto P = eval_P(up);
        CHECK(P.total() == doctest::Approx(1.0).epsilon(1e-13));
        int support = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    const auto A = static_cast<O>(a), B = static_cast<O>(b),
                               C = static_cast<O>(c);
                    CHECK(P.at(A, B, C) ==
                          doctest::Approx(P.at(B, C, A)).epsilon(1e-13));
                    CHECK(P.at(A, B, C) >= 0.0);
                    const bool has_zero = a == 0 || b == 0 || c == 0;
                    const bool has_two = a == 3 || b == 3 || c == 3;
                    const bool all_ones = !has_zero && !has_two;
                    if (!all_ones && P.at(A, B, C) != 0.0)
                        ++support;
                }
        // exactly 12 nonzero entries involve a 0 or 2 outcome
        CHECK(support == 12);
    }
}

TEST_CASE("eval_q at the degenerate point reduces to the parity form") {
    const auto up = uparam_boundary();
    const auto q = eval_q(up, correlator_origin<double>());
    CHECK(q.at(+1, +1, +1, +1) == doctest::Approx(1.0 / 8).epsilon(1e-13));
    CHECK(q.at(+1, +1, -1, +1) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(q.total() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("eval_q agrees with the term-by-term oracle, exactly") {
    std::mt19937_64 rng(7);
    const auto params = pythagorean_params();
    REQUIRE(params.size() >= 4);
    for (const auto& u : params) {
        const auto up = make_uparam_exact(u);
        const auto F = random_rational_point(rng);
        const auto q = eval_q(up, F);
        CHECK(q.total() == 1);
        for (int i : {+1, -1})
            for (int j : {+1, -1})
                for (int k : {+1, -1})
                    for (int t : {+1, -1})
                        CHECK(q.at(i, j, k, t) == q_entry_oracle(up, F, i, j, k, t));
    }
}

TEST_CASE("eval_q at u = 55/73 with F = (1,1,1,1)") {
    const auto up = make_uparam_exact(make_rational(55, 73));
    const CorrelatorPoint<Rational> F{Rational(1), Rational(1), Rational(1),
                                      Rational(1)};
    const auto q = eval_q(up, F);
    CHECK(q.at(-1, -1, -1, +1) == q_entry_oracle(up, F, -1, -1, -1, +1));
    CHECK(q.total() == 1);
    // signed entries are expected here: F is outside the polytope
    bool negative = false;
    for (const auto& e : q.p)
        negative = negative || sgn(e) < 0;
    CHECK(negative);
}

TEST_CASE("normalization of eval_q is exact for random rational inputs") {
    std::mt19937_64 rng(99);
    const auto params = pythagorean_params();
    for (int trial = 0; trial < 20; ++trial) {
        const auto& u = params[trial % params.size()];
        const auto up = make_uparam_exact(u);
        const auto q = eval_q(up, random_rational_point(rng));
        CHECK(q.total() == 1);
        // each token slice carries exactly half the mass
        Rational plus(0);
        for (int i : {+1, -1})
            for (int j : {+1, -1})
                for (int k : {+1, -1})
                    plus += q.at(i, j, k, +1);
        CHECK(plus == make_rational(1, 2));
    }
}

TEST_CASE("fixed correlators") {
    const auto b = fixed_correlators(uparam_boundary());
    CHECK(b.f_a == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(b.e_ab == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(b.e_abc == doctest::Approx(1.0).epsilon(1e-13));

    const auto one = fixed_correlators(make_uparam_exact(Rational(1)));
    CHECK(one.f_a == 1);
    CHECK(one.e_ab == 1);
    CHECK(one.e_abc == 0);

    const auto p = make_uparam_exact(make_rational(55, 73));
    const auto fc = fixed_correlators(p);
    mpz_class num = 8 * mpz_class(2640) * 2640 * 2640;
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 73, 6);
    Rational expected(num, den);
    expected.canonicalize();
    CHECK(fc.e_abc == expected);

    // cross-route: E_ABC as the expectation of ijk under q at F = 0
    const auto q = eval_q(p, correlator_origin<Rational>());
    Rational e3(0);
    for (int i : {+1, -1})
        for (int j : {+1, -1})
            for (int k : {+1, -1})
                for (int t : {+1, -1})
                    e3 += Rational(i * j * k) * q.at(i, j, k, t);
    CHECK(e3 == expected);
    // and per token slice, doubled
    for (int t : {+1, -1}) {
        Rational acc(0);
        for (int i : {+1, -1})
            for (int j : {+1, -1})
                for (int k : {+1, -1})
                    acc += Rational(i * j * k) * q.at(i, j, k, t);
        CHECK(2 * acc == expected);
    }
}

TEST_CASE("condition_q at the degenerate point") {
    const auto up = uparam_boundary();
    const auto q = eval_q(up, correlator_origin<double>());
    const auto qm = condition_q(q, -1);
    CHECK(qm.t_label == -1);
    CHECK(qm.total() == doctest::Approx(1.0).epsilon(1e-13));
    for (int i : {+1, -1})
        for (int j : {+1, -1})
            for (int k : {+1, -1})
                CHECK(qm.at(i, j, k) ==
                      doctest::Approx((1.0 + i * j * k) / 8).epsilon(1e-13));
}

TEST_CASE("condition_q rejects negative slices") {
    const auto up = make_uparam(0.8090);
    const CorrelatorPoint<double> F{1, 1, 1, -1};
    const auto q = eval_q(up, F);
    CHECK_THROWS_AS(condition_q(q, -1), NegativeConditional);
    // the same point violates at least one polytope row
    const auto poly = polytope::build_polytope(up);
    int violated = 0;
    for (const auto& row : poly.halfspaces.rows)
        if (row.value(F) < 0)
            ++violated;
    CHECK(violated > 0);
}

TEST_CASE("single-party marginals of the conditionals") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        const auto up = make_uparam(testsupport::random_u(rng));
        const CorrelatorPoint<double> F{0.1, -0.2, 0.05, 0.3};
        const auto q = eval_q(up, F);
        for (int t : {+1, -1}) {
            double qa = 0;
            for (int j : {+1, -1})
                for (int k : {+1, -1})
                    qa += 2 * q.at(+1, j, k, t);
            const double expected = (1.0 + t * (2 * up.s - 1)) / 2;
            CHECK(qa == doctest::Approx(expected).epsilon(1e-12));
            const double ref = t == 1 ? up.s : up.v * up.v;
            CHECK(qa == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("consistency relations hold across the family") {
    // exact at a Pythagorean point, with the reference vertex as F
    const auto up = make_uparam_exact(make_rational(4, 5));
    const auto F = polytope::qplus_vertex(up);
    const auto rep = check_consistency(eval_q(up, F), eval_P(up));
    CHECK(rep.all_pass);
    CHECK(rep.max_residual == 0.0);

    // float at the degenerate point
    const auto b = uparam_boundary();
    const auto rep2 =
        check_consistency(eval_q(b, correlator_origin<double>()), eval_P(b));
    CHECK(rep2.all_pass);
    CHECK(rep2.max_residual <= 1e-12);

    // float at u = 0.8 with an interior F
    const auto u8 = make_uparam(0.8);
    const auto F8 = polytope::qplus_vertex(u8);
    const CorrelatorPoint<double> inner{F8.f_ab / 2, F8.f_bc / 2, F8.f_ac / 2,
                                        F8.f_abc / 2};
    const auto rep3 = check_consistency(eval_q(u8, inner), eval_P(u8));
    CHECK(rep3.all_pass);
    CHECK(rep3.max_residual <= 1e-12);
}

TEST_CASE("consistency detects a corrupted distribution") {
    const auto up = make_uparam(0.8);
    auto q = eval_q(up, polytope::qplus_vertex(up));
    q.at(+1, -1, +1, +1) += 1e-3;
    const auto rep = check_consistency(q, eval_P(up));
    CHECK_FALSE(rep.all_pass);
    CHECK(rep.max_residual >= 1e-4);
    CHECK(rep.max_residual <= 2e-3);
    bool three_party_failed = false;
    for (const auto& e : rep.entries)
        if (!e.pass && e.relation.rfind("three-party", 0) == 0)
            three_party_failed = true;
    CHECK(three_party_failed);
}
