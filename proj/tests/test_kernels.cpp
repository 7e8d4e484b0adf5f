#include "doctest.h"

#include <cmath>
#include <vector>

#include "igcp/kernels.hpp"
#include "igcp/pmf.hpp"

using namespace igcp;

namespace {

// defining series e^{-x} sum_r r^n x^r / r!, truncated once terms fall below
// 1e-16 of the running sum for 50 consecutive terms
double bell_series_oracle(int n, double x) {
    double sum = (n == 0) ? 1.0 : 0.0;  // r = 0 term
    int quiet = 0;
    for (int r = 1; r < 4000 && quiet < 50; ++r) {
        double log_term = n * std::log(double(r)) + r * std::log(x) - log_factorial(r);
        double term = std::exp(log_term);
        sum += term;
        quiet = (term < 1e-16 * sum) ? quiet + 1 : 0;
    }
    return std::exp(-x) * sum;
}

// Simpson quadrature of int_0^x e^{-u} u^{s-1} du
double incgamma_quadrature_oracle(double s, double x, int panels = 20000) {
    auto f = [&](double u) { return u <= 0.0 ? 0.0 : std::exp(-u) * std::pow(u, s - 1.0); };
    double h = x / panels;
    double acc = f(0.0) + f(x);
    for (int i = 1; i < panels; ++i) acc += f(i * h) * ((i & 1) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

long long brute_force_partition_count(int k, int n) {
    // walk the whole box x_j <= n
    std::vector<int> x(size_t(k), 0);
    long long count = 0;
    for (;;) {
        int w = 0;
        for (int j = 0; j < k; ++j) w += (j + 1) * x[size_t(j)];
        if (w == n) ++count;
        int pos = 0;
        while (pos < k && ++x[size_t(pos)] > n) x[size_t(pos++)] = 0;
        if (pos == k) break;
    }
    return count;
}

}  // namespace

TEST_CASE("bell polynomial matches defining series") {
    CHECK(bell_polynomial(0, 3.7) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(bell_polynomial(1, 2.0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(bell_polynomial(2, 1.0) == doctest::Approx(2.0).epsilon(1e-13));

    for (double x : {0.1, 1.0, 5.0})
        for (int n = 0; n <= 15; ++n)
            CHECK(bell_polynomial(n, x) ==
                  doctest::Approx(bell_series_oracle(n, x)).epsilon(1e-12));
}

TEST_CASE("bell polynomial overflow raises range_error") {
    CHECK_THROWS_AS(bell_polynomial(500, 100.0), std::range_error);
}

TEST_CASE("three-parameter Mittag-Leffler") {
    auto e1 = mittag_leffler_3p(1.0, 1.0, 1.0, 1.0);
    CHECK(e1.value == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(e1.tail_bound < 1e-12);

    CHECK(mittag_leffler_3p(0.7, 1.0, 1.0, 0.0).value == 1.0);

    // E_{1/2,1}(-z) = e^{z^2} erfc(z) at z = 1
    auto eh = mittag_leffler_3p(0.5, 1.0, 1.0, -1.0);
    CHECK(eh.value == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-10));

    // delta = beta = 1 reduction to the exponential
    for (double x : {-2.0, -0.5, 0.3, 2.5})
        CHECK(mittag_leffler_3p(1.0, 1.0, 1.0, x).value ==
              doctest::Approx(std::exp(x)).epsilon(1e-12));

    CHECK_THROWS_AS(mittag_leffler_3p(0.5, 1.0, 1.0, -30.0, 1e-12, 5), truncation_error);
    CHECK_THROWS_AS(mittag_leffler_3p(1.5, 1.0, 1.0, 0.5), std::domain_error);
}

TEST_CASE("weighted partition enumeration order and counts") {
    auto p13 = enumerate_weighted_partitions(1, 3);
    REQUIRE(p13.size() == 1);
    CHECK(p13[0].parts == std::vector<int>{3});

    auto p22 = enumerate_weighted_partitions(2, 2);
    REQUIRE(p22.size() == 2);
    CHECK(p22[0].parts == std::vector<int>{2, 0});
    CHECK(p22[1].parts == std::vector<int>{0, 1});

    auto p34 = enumerate_weighted_partitions(3, 4);
    REQUIRE(p34.size() == 4);
    CHECK(p34[0].parts == std::vector<int>{4, 0, 0});
    CHECK(p34[1].parts == std::vector<int>{2, 1, 0});
    CHECK(p34[2].parts == std::vector<int>{0, 2, 0});
    CHECK(p34[3].parts == std::vector<int>{1, 0, 1});

    auto p0 = enumerate_weighted_partitions(3, 0);
    REQUIRE(p0.size() == 1);
    CHECK(p0[0].part_count() == 0);

    for (int k = 1; k <= 4; ++k)
        for (int n = 0; n <= 12; ++n) {
            auto got = enumerate_weighted_partitions(k, n);
            CHECK(static_cast<long long>(got.size()) == brute_force_partition_count(k, n));
            CHECK(static_cast<long long>(got.size()) == count_weighted_partitions(k, n));
            for (const auto& wp : got) {
                int w = 0;
                for (int j = 0; j < k; ++j) w += (j + 1) * wp.parts[size_t(j)];
                CHECK(w == n);
            }
        }
}

TEST_CASE("composition enumeration") {
    auto c03 = enumerate_compositions(0, 3);
    REQUIRE(c03.size() == 1);
    CHECK(c03[0] == std::vector<int>{0, 0, 0});

    auto c22 = enumerate_compositions(2, 2);
    REQUIRE(c22.size() == 3);
    CHECK(c22[0] == std::vector<int>{2, 0});
    CHECK(c22[1] == std::vector<int>{1, 1});
    CHECK(c22[2] == std::vector<int>{0, 2});

    CHECK(count_compositions(4, 3) == 15);
    CHECK(static_cast<long long>(enumerate_compositions(4, 3).size()) == 15);
}

TEST_CASE("pmf convolution power") {
    PmfVector geom;
    double p = 0.4;
    geom.p.assign(200, 0.0);
    for (size_t n = 1; n < geom.p.size(); ++n)
        geom.p[n] = p * std::pow(1.0 - p, double(n) - 1.0);
    geom.tail_bound = std::pow(1.0 - p, 199.0);

    SUBCASE("m = 0 is the point mass at zero") {
        auto d0 = pmf_convolution_power(geom, 0);
        CHECK(d0.p.size() == 1);
        CHECK(d0.p[0] == 1.0);
    }

    SUBCASE("negative binomial closed form") {
        for (int m : {1, 2, 3, 5}) {
            auto conv = pmf_convolution_power(geom, m);
            for (long n = m; n <= 30; ++n) {
                double expect = binomial(int(n) - 1, m - 1) * std::pow(p, m) *
                                std::pow(1.0 - p, double(n - m));
                CHECK(conv.at(n) == doctest::Approx(expect).epsilon(1e-10));
            }
        }
    }

    SUBCASE("Poisson square at zero") {
        PmfVector pois;
        pois.p.assign(60, 0.0);
        for (size_t n = 0; n < pois.p.size(); ++n)
            pois.p[n] = std::exp(-1.0 - log_factorial(int(n)));
        auto sq = pmf_convolution_power(pois, 2);
        CHECK(sq.p[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    }

    SUBCASE("mass multiplies") {
        for (int m : {1, 2, 4}) {
            auto conv = pmf_convolution_power(geom, m);
            CHECK(conv.mass() ==
                  doctest::Approx(std::pow(geom.mass(), m)).epsilon(1e-12));
            CHECK(conv.tail_bound >= 0.0);
        }
    }
}

TEST_CASE("lower incomplete gamma") {
    for (double x : {0.2, 1.0, 3.0})
        CHECK(lower_incomplete_gamma(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));
    CHECK(lower_incomplete_gamma(2.5, 0.0) == 0.0);
    CHECK(lower_incomplete_gamma(2.0, 1.0) ==
          doctest::Approx(incgamma_quadrature_oracle(2.0, 1.0)).epsilon(1e-9));
    CHECK(lower_incomplete_gamma(2.0, 1.0) ==
          doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(lower_incomplete_gamma(-1.0, 1.0), std::domain_error);

    // regularized pair sums to one
    for (double s : {0.5, 2.0, 7.5})
        for (double x : {0.1, 2.0, 9.0})
            CHECK(regularized_gamma_p(s, x) + regularized_gamma_q(s, x) ==
                  doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("falling factorial") {
    CHECK(falling_factorial(5, 0) == 1);
    CHECK(falling_factorial(3, 3) == 6);
    CHECK(falling_factorial(2, 3) == 0);
    CHECK(falling_factorial(6, 2) == 30);
}
