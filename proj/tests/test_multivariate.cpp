#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "igcp/mc.hpp"
#include "igcp/multivariate.hpp"

using namespace igcp;

namespace {

MvIgcpParams desk_params() {
    return MvIgcpParams({GcpParams({0.6, 0.3}), GcpParams({0.4, 0.2})}, GcpParams({0.7, 0.3}));
}

// eigenvalues of a small symmetric matrix by cyclic Jacobi rotations
std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
    size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-24) break;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-30) continue;
                double theta = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
                double c = std::cos(theta), s = std::sin(theta);
                for (size_t i = 0; i < n; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (size_t i = 0; i < n; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
    }
    std::vector<double> ev(n);
    for (size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    return ev;
}

// independent assembly of the codifference from inner-conditioned moment
// functionals: log E e^{w(Mi - Ml)} - log E e^{w Mi} - log E e^{-w Ml}
std::complex<double> codifference_oracle(const MvIgcpParams& params, int i, int l,
                                         std::complex<double> omega, double t) {
    const GcpParams& ci = params.components[size_t(i) - 1];
    const GcpParams& cl = params.components[size_t(l) - 1];
    auto layer_exponent = [](const GcpParams& g, std::complex<double> w) {
        std::complex<double> acc{0.0, 0.0};
        for (size_t j = 0; j < g.rates.size(); ++j)
            acc += g.rates[j] * (std::exp(w * double(j + 1)) - 1.0);
        return acc;
    };
    PmfVector inner = gcp_pmf_vector(params.inner, t);
    std::complex<double> a = layer_exponent(ci, omega);
    std::complex<double> b = layer_exponent(cl, -omega);
    std::complex<double> e_joint{0.0, 0.0}, e_i{0.0, 0.0}, e_l{0.0, 0.0};
    for (long m = 0; m <= inner.max_state(); ++m) {
        double w = inner.at(m);
        e_i += w * std::exp(double(m) * a);
        e_l += w * std::exp(double(m) * b);
        if (i == l)
            e_joint += w;  // the difference vanishes identically
        else
            e_joint += w * std::exp(double(m) * (a + b));
    }
    return std::log(e_joint) - std::log(e_i) - std::log(e_l);
}

}  // namespace

TEST_CASE("joint pgf") {
    auto params = desk_params();
    CHECK(mv_pgf(params, {1.0, 1.0}, 2.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(mv_pgf(params, {1.2, 0.0}, 1.0), std::domain_error);

    SUBCASE("single component matches the scalar pgf") {
        MvIgcpParams single({GcpParams({1.0, 0.5})}, GcpParams({0.7, 0.3}));
        IgcpParams flat(GcpParams({1.0, 0.5}), GcpParams({0.7, 0.3}));
        for (double u : {0.0, 0.4, 0.9})
            CHECK(mv_pgf(single, {u}, 1.0) == doctest::Approx(igcp_pgf(flat, u, 1.0)).epsilon(1e-12));
    }
    SUBCASE("pgf reconstructed from the joint pmf") {
        std::vector<double> u{0.5, 0.7};
        double rec = 0.0;
        for (long n1 = 0; n1 <= 30; ++n1)
            for (long n2 = 0; n2 <= 30; ++n2)
                rec += std::pow(u[0], double(n1)) * std::pow(u[1], double(n2)) *
                       mv_pmf(params, {n1, n2}, 1.0).value;
        CHECK(std::abs(rec - mv_pgf(params, u, 1.0)) <= 1e-7);
    }
}

TEST_CASE("joint pmf: closed forms, equivalence, normalization") {
    auto params = desk_params();

    SUBCASE("origin probability") {
        double expo = 0.0;
        for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
            expo += params.inner.rates[j0] *
                    (1.0 - std::exp(-double(j0 + 1) * params.capital_lambda()));
        CHECK(mv_pmf(params, {0, 0}, 1.3).value == doctest::Approx(std::exp(-1.3 * expo)).epsilon(1e-10));
    }
    SUBCASE("single component reduces to the scalar pmf") {
        MvIgcpParams single({GcpParams({1.0, 0.5})}, GcpParams({0.7, 0.3}));
        IgcpParams flat(GcpParams({1.0, 0.5}), GcpParams({0.7, 0.3}));
        for (long n = 0; n <= 10; ++n)
            CHECK(mv_pmf(single, {n}, 1.0).value ==
                  doctest::Approx(igcp_pmf(flat, n, 1.0).value).epsilon(1e-10));
    }
    SUBCASE("series form equals the closed Bell form") {
        double max_diff = 0.0;
        for (long n1 = 0; n1 <= 6; ++n1)
            for (long n2 = 0; n2 <= 6; ++n2)
                max_diff = std::max(max_diff, std::abs(mv_pmf(params, {n1, n2}, 1.0).value -
                                                       mv_pmf_bell(params, {n1, n2}, 1.0).value));
        CHECK(max_diff <= 1e-8);
    }
    SUBCASE("joint normalization") {
        double mass = 0.0;
        for (long n1 = 0; n1 <= 40; ++n1)
            for (long n2 = 0; n2 <= 40; ++n2) mass += mv_pmf_bell(params, {n1, n2}, 1.0).value;
        CHECK(mass >= 1.0 - 1e-6);
    }
    SUBCASE("joint law against sampled lattice counts") {
        const long cap = 12;
        PmfVector expected;  // flattened lattice, overflow pooled at the end
        expected.p.assign(size_t((cap + 1) * (cap + 1)), 0.0);
        for (long n1 = 0; n1 <= cap; ++n1)
            for (long n2 = 0; n2 <= cap; ++n2)
                expected.p[size_t(n1 * (cap + 1) + n2)] = mv_pmf(params, {n1, n2}, 1.0).value;
        std::vector<long long> obs(expected.p.size() + 1, 0);
        for (long long i = 0; i < 100000; ++i) {
            RngStream s(5150, uint64_t(i));
            auto v = sample_mv_value(params, 1.0, s);
            if (v[0] <= cap && v[1] <= cap)
                ++obs[size_t(v[0] * (cap + 1) + v[1])];
            else
                ++obs.back();
        }
        auto gof = chi_square_gof(obs, expected);
        CHECK(gof.p_value >= 1e-3);
    }
}

TEST_CASE("joint forward equations") {
    MvIgcpParams small({GcpParams({0.5}), GcpParams({0.3})}, GcpParams({0.6}));
    CHECK(mv_ode_verify(small, {7, 7}, 1.5) <= 1e-6);

    MvIgcpParams single({GcpParams({0.6})}, GcpParams({0.5}));
    CHECK(mv_ode_verify(single, {10}, 1.5) <= 1e-6);
}

TEST_CASE("joint Levy measure") {
    auto params = desk_params();
    double total = 0.0;
    for (long n1 = 0; n1 <= 60; ++n1)
        for (long n2 = 0; n2 <= 60; ++n2) {
            if (n1 == 0 && n2 == 0) continue;
            double v = mv_levy_measure(params, {n1, n2});
            CHECK(v >= 0.0);
            total += v;
        }
    double expect = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
        expect += params.inner.rates[j0] *
                  (1.0 - std::exp(-double(j0 + 1) * params.capital_lambda()));
    CHECK(std::abs(total - expect) <= 1e-10);

    MvIgcpParams single({GcpParams({1.0, 0.5})}, GcpParams({0.7, 0.3}));
    IgcpParams flat(GcpParams({1.0, 0.5}), GcpParams({0.7, 0.3}));
    for (long n = 1; n <= 8; ++n)
        CHECK(mv_levy_measure(single, {n}) ==
              doctest::Approx(igcp_levy_measure(flat, n)).epsilon(1e-12));
    CHECK_THROWS_AS(mv_levy_measure(params, {0, 0}), std::invalid_argument);
}

TEST_CASE("covariance matrix") {
    auto params = desk_params();
    double t = 1.0;

    SUBCASE("diagonal equals the component variance") {
        IgcpParams comp1(params.components[0], params.inner);
        CHECK(mv_covariance(params, 1, 1, t) ==
              doctest::Approx(igcp_moments(comp1, t, t).variance).epsilon(1e-12));
    }
    SUBCASE("shared clock induces positive cross covariance") {
        CHECK(mv_covariance(params, 1, 2, t) > 0.0);
        CHECK(mv_covariance(params, 1, 2, t) == doctest::Approx(mv_covariance(params, 2, 1, t)));
    }
    SUBCASE("positive semidefinite") {
        for (double tt : {0.5, 1.0, 3.0}) {
            std::vector<std::vector<double>> sigma(2, std::vector<double>(2));
            for (int i = 1; i <= 2; ++i)
                for (int l = 1; l <= 2; ++l) sigma[size_t(i - 1)][size_t(l - 1)] = mv_covariance(params, i, l, tt);
            for (double ev : symmetric_eigenvalues(sigma)) CHECK(ev >= -1e-10);
        }
    }
    SUBCASE("Monte Carlo cross moment") {
        McConfig cfg;
        cfg.samples = 100000;
        cfg.master_seed = 424242;
        IgcpParams comp1(params.components[0], params.inner);
        IgcpParams comp2(params.components[1], params.inner);
        double m1 = igcp_moments(comp1, t, t).mean;
        double m2 = igcp_moments(comp2, t, t).mean;
        auto est = run_mc(
            [&](RngStream& s) {
                auto v = sample_mv_value(params, t, s);
                return (double(v[0]) - m1) * (double(v[1]) - m2);
            },
            cfg);
        CHECK(std::abs(est.mean - mv_covariance(params, 1, 2, t)) <= 4.0 * est.std_error);
    }
}

TEST_CASE("codifference") {
    auto params = desk_params();
    double t = 1.0;

    SUBCASE("vanishes at omega = 0") {
        CHECK(std::abs(mv_codifference(params, 1, 2, {0.0, 0.0}, t)) == doctest::Approx(0.0));
        CHECK(std::abs(mv_codifference(params, 1, 1, {0.0, 0.0}, t)) == doctest::Approx(0.0));
    }
    SUBCASE("matches the moment-functional assembly at small omega") {
        for (std::complex<double> w : {std::complex<double>{0.1, 0.0},
                                       std::complex<double>{-0.15, 0.0},
                                       std::complex<double>{0.0, 0.1},
                                       std::complex<double>{0.05, 0.08}}) {
            auto direct = mv_codifference(params, 1, 2, w, t);
            auto oracle = codifference_oracle(params, 1, 2, w, t);
            CHECK(std::abs(direct - oracle) <= 1e-8);
        }
    }
    SUBCASE("same-component branch drops the cross term") {
        std::complex<double> w{0.1, 0.0};
        auto self = mv_codifference(params, 1, 1, w, t);
        auto oracle = codifference_oracle(params, 1, 1, w, t);
        CHECK(std::abs(self - oracle) <= 1e-8);
    }
}

TEST_CASE("sampling the joint law") {
    auto params = desk_params();
    SUBCASE("marginals match the scalar pmf") {
        IgcpParams comp2(params.components[1], params.inner);
        auto expected = igcp_pmf_vector(comp2, 1.0);
        std::vector<long long> obs(size_t(expected.max_state()) + 1, 0);
        for (long long i = 0; i < 100000; ++i) {
            RngStream s(616, uint64_t(i));
            auto v = sample_mv_value(params, 1.0, s);
            if (size_t(v[1]) < obs.size()) ++obs[size_t(v[1])];
        }
        auto gof = chi_square_gof(obs, expected);
        CHECK(gof.p_value >= 1e-3);
    }
    SUBCASE("empirical cross correlation is positive") {
        double s12 = 0.0, s1 = 0.0, s2 = 0.0;
        const long long n = 50000;
        for (long long i = 0; i < n; ++i) {
            RngStream s(717, uint64_t(i));
            auto v = sample_mv_value(params, 1.0, s);
            s1 += double(v[0]);
            s2 += double(v[1]);
            s12 += double(v[0]) * double(v[1]);
        }
        CHECK(s12 / double(n) - s1 / double(n) * s2 / double(n) > 0.0);
    }
}
