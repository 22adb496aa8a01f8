#pragma once

#include <random>
#include <vector>

#include "inflacert/family.hpp"
#include "inflacert/localmodel.hpp"

// Shared helpers for the test suites: parameter generators and random
// discrete triangle-local models.

namespace testsupport {

using inflacert::Rational;
using inflacert::make_rational;

// Pythagorean ratios u = leg/hyp with u^2 > 1/2, ordered by value.
inline std::vector<Rational> pythagorean_params() {
    std::vector<Rational> out;
    for (long m = 2; m <= 12; ++m)
        for (long n = 1; n < m; ++n) {
            if ((m - n) % 2 == 0 || std::gcd(m, n) != 1)
                continue;
            const long a = m * m - n * n, b = 2 * m * n, c = m * m + n * n;
            for (const long leg : {a, b}) {
                Rational u(leg, c);
                u.canonicalize();
                if (2 * u * u > 1 && u < 1)
                    out.push_back(u);
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

inline double random_u(std::mt19937_64& rng, double lo = 0.7072, double hi = 0.999) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

template <class T>
std::vector<T> random_simplex(std::mt19937_64& rng, std::size_t n);

template <>
inline std::vector<double> random_simplex<double>(std::mt19937_64& rng,
                                                  std::size_t n) {
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    std::vector<double> v(n);
    double sum = 0;
    for (auto& x : v)
        sum += (x = dist(rng));
    for (auto& x : v)
        x /= sum;
    return v;
}

template <>
inline std::vector<Rational> random_simplex<Rational>(std::mt19937_64& rng,
                                                      std::size_t n) {
    std::uniform_int_distribution<long> dist(1, 24);
    std::vector<long> w(n);
    long sum = 0;
    for (auto& x : w)
        sum += (x = dist(rng));
    std::vector<Rational> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = make_rational(w[i], sum);
    return v;
}

template <class T>
inflacert::local::TriangleLocalModel<T> random_model(std::mt19937_64& rng,
                                                     std::size_t max_alphabet = 3) {
    std::uniform_int_distribution<std::size_t> size_dist(1, max_alphabet);
    inflacert::local::TriangleLocalModel<T> m;
    m.mu_bc = random_simplex<T>(rng, size_dist(rng));
    m.mu_ac = random_simplex<T>(rng, size_dist(rng));
    m.mu_ab = random_simplex<T>(rng, size_dist(rng));
    const auto fill = [&rng](std::vector<std::array<T, 2>>& resp, std::size_t n) {
        resp.resize(n);
        for (auto& cell : resp) {
            const auto pair = random_simplex<T>(rng, 2);
            cell = {pair[0], pair[1]};
        }
    };
    fill(m.resp_a, m.n_beta() * m.n_gamma());
    fill(m.resp_b, m.n_gamma() * m.n_alpha());
    fill(m.resp_c, m.n_alpha() * m.n_beta());
    return m;
}

} // namespace testsupport
