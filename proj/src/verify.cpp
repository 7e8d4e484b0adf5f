#include "igcp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "igcp/compound.hpp"
#include "igcp/igcp.hpp"
#include "igcp/mc.hpp"
#include "igcp/multivariate.hpp"
#include "igcp/qiter.hpp"
#include "igcp/timechange.hpp"

namespace igcp::verify {

namespace {

CheckResult le(const std::string& name, double value, double threshold) {
    return CheckResult{name, value, threshold, "le", value <= threshold, "ok"};
}

CheckResult ge(const std::string& name, double value, double threshold) {
    return CheckResult{name, value, threshold, "ge", value >= threshold, "ok"};
}

IgcpParams desk_igcp() { return IgcpParams(GcpParams({1.0, 0.5}), GcpParams({0.7, 0.3})); }

// defining series of the Bell polynomial, truncated far below rounding
double bell_series(int n, double x) {
    double sum = (n == 0) ? 1.0 : 0.0;
    int quiet = 0;
    for (int r = 1; r < 4000 && quiet < 50; ++r) {
        double term = std::exp(n * std::log(double(r)) + r * std::log(x) - log_factorial(r));
        sum += term;
        quiet = (term < 1e-16 * sum) ? quiet + 1 : 0;
    }
    return std::exp(-x) * sum;
}

std::vector<CheckResult> suite_kernels(uint64_t) {
    std::vector<CheckResult> out;
    double max_rel = 0.0;
    for (double x : {0.1, 1.0, 5.0}) {
        auto table = bell_polynomial_table(15, x);
        for (int n = 0; n <= 15; ++n) {
            double ref = bell_series(n, x);
            max_rel = std::max(max_rel, std::abs(table[size_t(n)] - ref) / ref);
        }
    }
    out.push_back(le("c01.bell_recurrence_vs_series", max_rel, 1e-12));
    out.push_back(le("c01.ml_exponential_identity",
                     std::abs(mittag_leffler_3p(1.0, 1.0, 1.0, 1.0).value - std::exp(1.0)),
                     1e-12));
    out.push_back(le("c01.ml_erfc_identity",
                     std::abs(mittag_leffler_3p(0.5, 1.0, 1.0, -1.0).value -
                              std::exp(1.0) * std::erfc(1.0)),
                     1e-10));
    return out;
}

std::vector<CheckResult> suite_gcp(uint64_t seed) {
    std::vector<CheckResult> out;
    GcpParams params({1.0, 0.5});
    double max_tail = 0.0;
    for (double t : {0.5, 1.0, 3.0})
        max_tail = std::max(max_tail, gcp_pmf_vector(params, t).tail_bound);
    out.push_back(le("c02.gcp_normalization_tail", max_tail, 1e-9));

    auto expected = gcp_pmf_vector(params, 1.0);
    std::vector<long long> obs(size_t(expected.max_state()) + 1, 0);
    for (long long i = 0; i < 100000; ++i) {
        RngStream s(seed, uint64_t(i));
        long v = sample_gcp_value(params, 1.0, s);
        if (size_t(v) < obs.size()) ++obs[size_t(v)];
    }
    out.push_back(ge("c02.gcp_sampler_gof_p", chi_square_gof(obs, expected).p_value, 1e-3));
    return out;
}

std::vector<CheckResult> suite_igcp_pmf(uint64_t) {
    auto params = desk_igcp();
    double max_diff = 0.0;
    for (double t : {0.5, 1.0, 2.0})
        for (long n = 0; n <= 12; ++n)
            max_diff = std::max(max_diff, std::abs(igcp_pmf(params, n, t).value -
                                                   igcp_pmf_series_oracle(params, n, t).value));
    return {le("c03.igcp_bell_vs_conditioning", max_diff, 1e-8)};
}

std::vector<CheckResult> suite_igcp_ode(uint64_t) {
    IgcpParams small(GcpParams({0.6, 0.3}), GcpParams({0.5, 0.2}));
    return {le("c04.igcp_ode_max_error", igcp_ode_verify(small, 15, 2.0), 1e-6)};
}

std::vector<CheckResult> suite_igcp_mc(uint64_t seed) {
    std::vector<CheckResult> out;
    auto params = desk_igcp();
    McConfig cfg;
    cfg.samples = 100000;
    cfg.master_seed = seed;
    auto m = igcp_moments(params, 1.0, 1.0);

    auto mean_est =
        run_mc([&](RngStream& s) { return double(sample_igcp_value(params, 1.0, s)); }, cfg);
    out.push_back(le("c05.mc_mean_dev_se", std::abs(mean_est.mean - m.mean) / mean_est.std_error, 4.0));
    auto var_est = run_mc(
        [&](RngStream& s) {
            double v = double(sample_igcp_value(params, 1.0, s)) - m.mean;
            return v * v;
        },
        cfg, 1u << 20);
    out.push_back(le("c05.mc_var_dev_se", std::abs(var_est.mean - m.variance) / var_est.std_error, 4.0));

    uint64_t base = 1u << 21;
    int idx = 0;
    for (double t : {0.5, 1.0, 2.0}) {
        auto est = run_mc(
            [&](RngStream& s) {
                return martingale_residual(sample_igcp_value(params, t, s), params, t);
            },
            cfg, base);
        out.push_back(le("c05.martingale_residual_se_t" + std::to_string(idx++),
                         std::abs(est.mean) / est.std_error, 4.0));
        base += uint64_t(cfg.samples);
    }
    auto expm = run_mc(
        [&](RngStream& s) {
            return exponential_martingale(sample_igcp_value(params, 1.0, s), params, 0.2, 1.0);
        },
        cfg, base);
    out.push_back(le("c05.exponential_martingale_se", std::abs(expm.mean - 1.0) / expm.std_error, 4.0));
    return out;
}

std::vector<CheckResult> suite_levy(uint64_t) {
    auto params = desk_igcp();
    double total = 0.0;
    for (long n = 1; n <= 250; ++n) total += igcp_levy_measure(params, n);
    double expect = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
        expect += params.inner.rates[j0] *
                  (1.0 - std::exp(-double(j0 + 1) * params.outer.total_rate()));
    return {le("c06.levy_total_mass", std::abs(total - expect), 1e-10)};
}

std::vector<CheckResult> suite_first_passage(uint64_t seed) {
    std::vector<CheckResult> out;
    auto params = desk_igcp();
    double p_inf = first_passage_prob_finite(params);

    const int grid_n = 4000;
    const double s_hi = 40.0;
    std::vector<double> cdf_grid(grid_n + 1, 0.0);
    double acc = 0.0;
    double prev = first_passage_density(params, 1, 1e-9);
    for (int i = 1; i <= grid_n; ++i) {
        double s = s_hi * double(i) / grid_n;
        double d = first_passage_density(params, 1, s);
        acc += 0.5 * (prev + d) * (s_hi / grid_n);
        prev = d;
        cdf_grid[size_t(i)] = acc;
    }
    out.push_back(le("c07.fp_density_integral_vs_total", std::abs(acc - p_inf), 1e-4));

    // simulate crossing attempts; keep the exact hits of state one
    std::vector<double> hits;
    const double mu = params.inner.total_rate();
    for (long long i = 0; i < 100000; ++i) {
        RngStream s(seed, (1u << 22) + uint64_t(i));
        double t = 0.0;
        long value = 0;
        while (value < 1) {
            t += s.exponential(mu);
            double u = s.u01() * mu;
            int j0 = 1;
            double a = params.inner.rates[0];
            while (u > a && size_t(j0) < params.inner.rates.size()) {
                a += params.inner.rates[size_t(j0)];
                ++j0;
            }
            value += sample_gcp_value(params.outer, double(j0), s);
        }
        if (value == 1) hits.push_back(t);
    }
    auto cond_cdf = [&](double s) {
        double idx = s / s_hi * grid_n;
        if (idx >= grid_n) return 1.0;
        int lo = int(idx);
        double frac = idx - lo;
        return (cdf_grid[size_t(lo)] * (1.0 - frac) + cdf_grid[size_t(lo) + 1] * frac) / p_inf;
    };
    out.push_back(ge("c07.fp_ks_p", ks_test(hits, cond_cdf).p_value, 1e-3));
    return out;
}

std::vector<CheckResult> suite_fractional(uint64_t seed) {
    std::vector<CheckResult> out;
    auto params = desk_igcp();
    double S = params.s_constant();
    const double t = 1.0;
    auto m = fractional_integral_moments(params, 1.0, t);

    McConfig cfg;
    cfg.samples = 100000;
    cfg.master_seed = seed;
    auto est = run_mc(
        [&](RngStream& s) {
            auto path = sample_igcp_path(params, t, s);
            return (double(path.value_at(t)) - S * t) * (path.integral_to(t) - m.mean);
        },
        cfg, 1u << 23);
    out.push_back(le("c08.frac_cov_dev_se", std::abs(est.mean - m.cov_with_process) / est.std_error, 4.0));

    auto vec = igcp_pmf_vector(params, t);
    double total = 0.0;
    for (long n = 0; n <= vec.max_state(); ++n) {
        if (vec.at(n) < 1e-14) break;
        total += fractional_integral_conditional_mean(params, 1.0, t, n).value * vec.at(n);
    }
    out.push_back(le("c08.frac_total_expectation_rel", std::abs(total - m.mean) / m.mean, 1e-3));
    return out;
}

std::vector<CheckResult> suite_compound(uint64_t seed) {
    std::vector<CheckResult> out;
    auto params = desk_igcp();
    auto geom = JumpLaw::geometric(0.6);
    auto expo = JumpLaw::exponential(2.0);

    PmfVector expected;
    expected.p.assign(60, 0.0);
    for (long n = 0; n < 60; ++n)
        expected.p[size_t(n)] = compound_igcp_pmf(params, geom, n, 1.0).value;
    std::vector<long long> obs(60, 0);
    for (long long i = 0; i < 100000; ++i) {
        RngStream s(seed, (1u << 24) + uint64_t(i));
        auto v = long(sample_compound_value(params, geom, 1.0, s));
        if (size_t(v) < obs.size()) ++obs[size_t(v)];
    }
    out.push_back(ge("c09.compound_pmf_gof_p", chi_square_gof(obs, expected).p_value, 1e-3));

    std::vector<double> xs;
    for (long long i = 0; i < 100000; ++i) {
        RngStream s(seed, (1u << 25) + uint64_t(i));
        double v = sample_compound_value(params, expo, 1.0, s);
        if (v > 0.0) xs.push_back(v);
    }
    double atom = igcp_pmf(params, 0, 1.0).value;
    auto ks = ks_test(xs, [&](double w) {
        return (compound_igcp_cdf(params, expo, w, 1.0) - atom) / (1.0 - atom);
    });
    out.push_back(ge("c09.compound_cdf_ks_p", ks.p_value, 1e-3));

    double max_pgf_diff = 0.0;
    std::vector<JumpLaw> laws{JumpLaw::point_mass(1.0), geom,
                              JumpLaw::gcp_unit(GcpParams({0.4, 0.2})),
                              JumpLaw::explicit_discrete(PmfVector{{0.2, 0.5, 0.3}, 0.0})};
    for (const auto& law : laws)
        for (double u : {0.0, 0.35, 0.8, 1.0})
            max_pgf_diff = std::max(max_pgf_diff,
                                    std::abs(d_process_pgf(params, law, u, 1.0) -
                                             compound_igcp_pgf(params, law, u, 1.0)));
    out.push_back(le("c09.dprocess_pgf_identity", max_pgf_diff, 1e-10));

    std::vector<double> times{0.6, 1.2};
    std::vector<long> targets{2, 4};
    double analytic = compound_fdd(params, geom, times, targets);
    long long inside = 0, total = 100000;
    for (long long i = 0; i < total; ++i) {
        RngStream s(seed, (1u << 26) + uint64_t(i));
        double z1 = sample_compound_value(params, geom, 0.6, s);
        double z2 = z1 + sample_compound_value(params, geom, 0.6, s);
        if (z1 <= double(targets[0]) && z2 <= double(targets[1])) ++inside;
    }
    double frac = double(inside) / double(total);
    double se = std::sqrt(analytic * (1.0 - analytic) / double(total));
    out.push_back(le("c09.fdd_joint_cell_dev_se", std::abs(frac - analytic) / se, 4.0));
    return out;
}

std::vector<CheckResult> suite_multivariate(uint64_t seed) {
    std::vector<CheckResult> out;
    MvIgcpParams params({GcpParams({0.6, 0.3}), GcpParams({0.4, 0.2})}, GcpParams({0.7, 0.3}));

    double max_diff = 0.0;
    for (long n1 = 0; n1 <= 6; ++n1)
        for (long n2 = 0; n2 <= 6; ++n2)
            max_diff = std::max(max_diff, std::abs(mv_pmf(params, {n1, n2}, 1.0).value -
                                                   mv_pmf_bell(params, {n1, n2}, 1.0).value));
    out.push_back(le("c10.mv_series_vs_bell", max_diff, 1e-8));

    McConfig cfg;
    cfg.samples = 100000;
    cfg.master_seed = seed;
    IgcpParams comp1(params.components[0], params.inner);
    IgcpParams comp2(params.components[1], params.inner);
    double m1 = igcp_moments(comp1, 1.0, 1.0).mean;
    double m2 = igcp_moments(comp2, 1.0, 1.0).mean;
    auto est = run_mc(
        [&](RngStream& s) {
            auto v = sample_mv_value(params, 1.0, s);
            return (double(v[0]) - m1) * (double(v[1]) - m2);
        },
        cfg, 1u << 27);
    out.push_back(le("c10.mv_cov_dev_se",
                     std::abs(est.mean - mv_covariance(params, 1, 2, 1.0)) / est.std_error, 4.0));

    // codifference against the inner-conditioned moment-functional assembly
    auto layer_exponent = [](const GcpParams& g, std::complex<double> w) {
        std::complex<double> a{0.0, 0.0};
        for (size_t j = 0; j < g.rates.size(); ++j)
            a += g.rates[j] * (std::exp(w * double(j + 1)) - 1.0);
        return a;
    };
    double max_cod = 0.0;
    PmfVector inner = gcp_pmf_vector(params.inner, 1.0);
    for (std::complex<double> w : {std::complex<double>{0.1, 0.0}, std::complex<double>{0.0, 0.1},
                                   std::complex<double>{0.05, 0.08}}) {
        std::complex<double> a = layer_exponent(params.components[0], w);
        std::complex<double> b = layer_exponent(params.components[1], -w);
        std::complex<double> e_joint{0.0, 0.0}, e_i{0.0, 0.0}, e_l{0.0, 0.0};
        for (long m = 0; m <= inner.max_state(); ++m) {
            double p = inner.at(m);
            e_i += p * std::exp(double(m) * a);
            e_l += p * std::exp(double(m) * b);
            e_joint += p * std::exp(double(m) * (a + b));
        }
        std::complex<double> oracle = std::log(e_joint) - std::log(e_i) - std::log(e_l);
        max_cod = std::max(max_cod, std::abs(mv_codifference(params, 1, 2, w, 1.0) - oracle));
    }
    out.push_back(le("c10.codifference_vs_mgf", max_cod, 1e-8));
    return out;
}

std::vector<CheckResult> suite_qiter(uint64_t seed) {
    std::vector<CheckResult> out;
    QIterParams q2(GcpParams({0.9}), {GcpParams({1.1}), GcpParams({0.8})});

    auto pois = [](double mean, long v) {
        if (mean == 0.0) return v == 0 ? 1.0 : 0.0;
        return std::exp(-mean + double(v) * std::log(mean) - log_factorial(int(v)));
    };
    double max_diff = 0.0;
    for (long n = 0; n <= 8; ++n) {
        double direct = 0.0;
        for (long s2 = 0; s2 <= 220; ++s2) {
            double w2 = pois(0.8, s2);
            double inner_sum = 0.0;
            for (long s1 = 0; s1 <= 260; ++s1)
                inner_sum += pois(1.1 * double(s2), s1) * pois(0.9 * double(s1), n);
            direct += w2 * inner_sum;
        }
        max_diff = std::max(max_diff, std::abs(qiter_pmf(q2, n, 1.0).value - direct));
    }
    out.push_back(le("c11.qiter_vs_double_series", max_diff, 1e-8));

    McConfig cfg;
    cfg.samples = 100000;
    cfg.master_seed = seed;
    auto m = qiter_moments(q2, 1.0);
    auto est = run_mc([&](RngStream& s) { return double(sample_qiter_value(q2, 1.0, s)); }, cfg,
                      1u << 28);
    out.push_back(le("c11.qiter_mean_dev_se", std::abs(est.mean - m.mean) / est.std_error, 4.0));
    auto var_est = run_mc(
        [&](RngStream& s) {
            double v = double(sample_qiter_value(q2, 1.0, s)) - m.mean;
            return v * v;
        },
        cfg, (1u << 28) + uint64_t(cfg.samples));
    out.push_back(le("c11.qiter_var_dev_se", std::abs(var_est.mean - m.variance) / var_est.std_error, 4.0));
    return out;
}

std::vector<CheckResult> suite_timechange(uint64_t seed) {
    std::vector<CheckResult> out;
    TcIgcpParams unit(IgcpParams(GcpParams({1.0}), GcpParams({1.0})), StableParams(0.6));
    TcIgcpParams desk(desk_igcp(), StableParams(0.6));

    double max_diff = 0.0;
    for (long n = 0; n <= 8; ++n)
        max_diff = std::max(max_diff, std::abs(tc_igcp_pmf(unit, n, 1.0).value -
                                               tc_igcp_pmf_oracle(unit, n, 1.0).value));
    out.push_back(le("c12.tc_pmf_vs_gfcp_oracle", max_diff, 1e-6));

    McConfig cfg;
    cfg.samples = 200000;
    cfg.master_seed = seed;
    auto m = tc_igcp_moments(desk, 1.0);
    auto est = run_mc([&](RngStream& s) { return double(sample_tc_igcp_value(desk, 1.0, s)); },
                      cfg, 1u << 29);
    out.push_back(le("c12.tc_mean_dev_se", std::abs(est.mean - m.mean) / est.std_error, 4.0));
    auto var_est = run_mc(
        [&](RngStream& s) {
            double v = double(sample_tc_igcp_value(desk, 1.0, s)) - m.mean;
            return v * v;
        },
        cfg, (1u << 29) + uint64_t(cfg.samples));
    out.push_back(le("c12.tc_var_dev_se", std::abs(var_est.mean - m.variance) / var_est.std_error, 4.0));

    double t = 1.3;
    auto mm = tc_igcp_moments(desk, t);
    double phi1 = tc_factorial_moment(desk, 1, t).value;
    out.push_back(le("c12.factorial_moment_r1_rel", std::abs(phi1 - mm.mean) / mm.mean, 1e-6));
    double phi2 = tc_factorial_moment(desk, 2, t).value;
    double expect2 = mm.variance + mm.mean * mm.mean - mm.mean;
    out.push_back(le("c12.factorial_moment_r2_rel", std::abs(phi2 - expect2) / expect2, 1e-6));

    auto grid = [](double t_end, int n) {
        std::vector<double> g(size_t(n) + 1);
        for (int i = 0; i <= n; ++i) g[size_t(i)] = t_end * double(i) / double(n);
        return g;
    };
    double r1 = tc_fractional_ode_residual(unit, 4, grid(2.0, 128));
    double r2 = tc_fractional_ode_residual(unit, 4, grid(2.0, 256));
    out.push_back(le("c12.caputo_order_gap", std::abs(std::log2(r1 / r2) - 1.4), 0.3));

    std::vector<double> lrd_grid;
    for (double tt = 1e3; tt <= 1.001e6; tt *= std::pow(10.0, 0.25)) lrd_grid.push_back(tt);
    out.push_back(le("c12.lrd_exponent_gap", std::abs(lrd_exponent(desk, 1.0, lrd_grid) - 0.6), 0.03));

    TcIgcpParams srd_params(IgcpParams(GcpParams({1.0}), GcpParams({1.0})), StableParams(0.7));
    McConfig srd_cfg;
    srd_cfg.samples = 400000;
    srd_cfg.master_seed = seed + 17;
    auto srd = srd_increment_diagnostic(srd_params, 1.0, 1.0, {3.0, 5.0, 8.0, 13.0}, srd_cfg, 0.05);
    out.push_back(ge("c12.srd_exponent", srd.conclusive ? srd.exponent : 0.0, 1.0));
    return out;
}

using SuiteFn = std::vector<CheckResult> (*)(uint64_t);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> table{
        {"kernels", suite_kernels},
        {"gcp", suite_gcp},
        {"igcp_pmf", suite_igcp_pmf},
        {"igcp_ode", suite_igcp_ode},
        {"igcp_mc", suite_igcp_mc},
        {"levy", suite_levy},
        {"first_passage", suite_first_passage},
        {"fractional", suite_fractional},
        {"compound", suite_compound},
        {"multivariate", suite_multivariate},
        {"qiter", suite_qiter},
        {"timechange", suite_timechange},
    };
    return table;
}

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : registry()) names.push_back(name);
    names.push_back("all");
    return names;
}

std::vector<CheckResult> run_suite(const std::string& name, uint64_t seed) {
    std::vector<CheckResult> out;
    bool found = false;
    for (const auto& [suite, fn] : registry()) {
        if (name != "all" && name != suite) continue;
        found = true;
        try {
            auto checks = fn(seed);
            out.insert(out.end(), checks.begin(), checks.end());
        } catch (const budget_error&) {
            out.push_back(CheckResult{suite + ".budget", 0.0, 0.0, "le", false, "budget_exceeded"});
        }
    }
    if (!found) throw std::invalid_argument("run_suite: unknown suite '" + name + "'");
    return out;
}

std::string report_json(const std::string& suite, uint64_t seed,
                        const std::vector<CheckResult>& checks) {
    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string out = "{\"suite\": \"" + suite + "\", \"seed\": " + std::to_string(seed) +
                      ", \"checks\": [";
    bool all_pass = true;
    for (size_t i = 0; i < checks.size(); ++i) {
        const auto& c = checks[i];
        if (i) out += ", ";
        out += "{\"check\": \"" + c.name + "\", \"value\": " + fmt(c.value) +
               ", \"threshold\": " + fmt(c.threshold) + ", \"op\": \"" + c.op +
               "\", \"pass\": " + (c.pass ? "true" : "false") + ", \"status\": \"" + c.status +
               "\"}";
        all_pass = all_pass && c.pass;
    }
    out += "], \"all_pass\": ";
    out += all_pass ? "true" : "false";
    out += "}\n";
    return out;
}

}  // namespace igcp::verify
