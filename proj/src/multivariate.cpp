#include "igcp/multivariate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "igcp/ode.hpp"

namespace igcp {

MvIgcpParams::MvIgcpParams(std::vector<GcpParams> comps, GcpParams in)
    : components(std::move(comps)), inner(std::move(in)) {
    if (components.empty()) throw std::invalid_argument("MvIgcpParams: need q >= 1 components");
    for (const auto& c : components)
        if (c.rates.empty()) throw std::invalid_argument("MvIgcpParams: empty component");
    if (inner.rates.empty()) throw std::invalid_argument("MvIgcpParams: empty inner layer");
}

double MvIgcpParams::capital_lambda() const {
    double s = 0.0;
    for (const auto& c : components) s += c.total_rate();
    return s;
}

double mv_pgf(const MvIgcpParams& params, const std::vector<double>& u, double t) {
    if (u.size() != size_t(params.q())) throw std::invalid_argument("mv_pgf: u size mismatch");
    for (double v : u)
        if (std::abs(v) > 1.0) throw std::domain_error("mv_pgf: |u_i| > 1");
    double theta = 0.0;
    for (int i = 0; i < params.q(); ++i)
        for (size_t j = 0; j < params.components[size_t(i)].rates.size(); ++j)
            theta += params.components[size_t(i)].rates[j] *
                     (1.0 - std::pow(u[size_t(i)], double(j + 1)));
    double s = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
        s += params.inner.rates[j0] * (1.0 - std::exp(-double(j0 + 1) * theta));
    return std::exp(-t * s);
}

namespace {

// iterate over the product of the per-component weighted partitions,
// reporting the total multiplicity count z and the log of the coefficient
// product
void for_each_component_combo(const MvIgcpParams& params, const std::vector<long>& n,
                              const std::function<void(double log_coef, long z)>& fn) {
    const int q = params.q();
    std::function<void(int, double, long)> rec = [&](int i, double log_coef, long z) {
        if (i == q) {
            fn(log_coef, z);
            return;
        }
        const auto& comp = params.components[size_t(i)];
        for_each_weighted_partition(comp.k(), int(n[size_t(i)]), [&](const std::vector<int>& x) {
            double lc = log_coef;
            long zz = z;
            for (int j = 0; j < comp.k(); ++j) {
                if (x[size_t(j)] == 0) continue;
                zz += x[size_t(j)];
                lc += x[size_t(j)] * std::log(comp.rates[size_t(j)]) - log_factorial(x[size_t(j)]);
            }
            rec(i + 1, lc, zz);
        });
    };
    rec(0, 0.0, 0);
}

}  // namespace

SeriesResult mv_pmf(const MvIgcpParams& params, const std::vector<long>& n, double t,
                    long m_max) {
    if (n.size() != size_t(params.q())) throw std::invalid_argument("mv_pmf: n size mismatch");
    for (long v : n)
        if (v < 0) return SeriesResult{0.0, 0, 0.0};
    const double cap_lambda = params.capital_lambda();
    const double mu = params.inner.total_rate();
    const int k0 = params.inner.k();

    long z_max = 0;
    for (long v : n) z_max += v;

    // damped inner masses: the m-series weight is
    // v(m) = e^{-mu t} * u(m), u as the mass recursion over mu_j0 t e^{-j0 L}
    std::vector<double> damped(static_cast<size_t>(k0));
    for (int j0 = 1; j0 <= k0; ++j0)
        damped[size_t(j0) - 1] =
            params.inner.rates[size_t(j0) - 1] * t * std::exp(-double(j0) * cap_lambda);

    long cap = (m_max > 0) ? m_max : 4000;
    std::vector<double> u_seq{1.0};
    std::vector<double> moment(size_t(z_max) + 1, 0.0);
    double e_mu_t = std::exp(-mu * t);
    for (long z = 0; z <= z_max; ++z) moment[size_t(z)] = (z == 0) ? e_mu_t : 0.0;  // m = 0 term

    double prev_term = 0.0;
    double tail = 0.0;
    long m = 1;
    for (; m <= cap; ++m) {
        double um = 0.0;
        for (int j0 = 1; j0 <= std::min<long>(k0, m); ++j0)
            um += double(j0) * damped[size_t(j0) - 1] * u_seq[size_t(m - j0)];
        um /= double(m);
        u_seq.push_back(um);
        double v = e_mu_t * um;
        double top = v * std::pow(double(m), double(z_max));
        for (long z = 0; z <= z_max; ++z) moment[size_t(z)] += v * std::pow(double(m), double(z));
        if (m_max < 0 && m > 8 && top < 1e-18 * std::max(moment[size_t(z_max)], 1e-300) &&
            top <= prev_term) {
            double ratio = prev_term > 0.0 ? std::min(top / prev_term, 0.9) : 0.0;
            tail = top * ratio / (1.0 - ratio);
            break;
        }
        prev_term = top;
    }

    double sum = 0.0;
    long terms = 0;
    for_each_component_combo(params, n, [&](double log_coef, long z) {
        sum += std::exp(log_coef) * moment[size_t(z)];
        ++terms;
    });
    return SeriesResult{sum, terms + m, tail + 1e-13 * std::max(sum, 1e-300)};
}

SeriesResult mv_pmf_bell(const MvIgcpParams& params, const std::vector<long>& n, double t,
                         long long work_budget) {
    if (n.size() != size_t(params.q()))
        throw std::invalid_argument("mv_pmf_bell: n size mismatch");
    for (long v : n)
        if (v < 0) return SeriesResult{0.0, 0, 0.0};
    long z_max = 0;
    for (long v : n) z_max += v;

    long long combos = 1;
    for (int i = 0; i < params.q(); ++i)
        combos *= count_weighted_partitions(params.components[size_t(i)].k(), int(n[size_t(i)]));
    if (combos * (z_max + 1) > work_budget)
        throw budget_error("mv_pmf_bell: lattice work exceeds budget", 0.0);

    std::vector<double> masses(params.inner.rates.size());
    for (size_t j0 = 0; j0 < masses.size(); ++j0) masses[j0] = params.inner.rates[j0] * t;
    std::vector<double> w = bell_mixture_weights(masses, params.capital_lambda(), z_max);

    double sum = 0.0;
    long terms = 0;
    for_each_component_combo(params, n, [&](double log_coef, long z) {
        sum += std::exp(log_coef) * w[size_t(z)];
        ++terms;
    });
    return SeriesResult{sum, terms, 1e-13 * std::max(sum, 1e-300)};
}

double mv_ode_verify(const MvIgcpParams& params, const std::vector<long>& n_max, double t_end,
                     int grid_points, double abs_tol) {
    const int q = params.q();
    if (n_max.size() != size_t(q)) throw std::invalid_argument("mv_ode_verify: n_max mismatch");
    const int k0 = params.inner.k();
    std::vector<long> len(static_cast<size_t>(q));
    long long cells = 1;
    for (int i = 0; i < q; ++i) {
        len[size_t(i)] = n_max[size_t(i)] + 1;
        cells *= len[size_t(i)];
    }
    if (cells > 1000000) throw budget_error("mv_ode_verify: lattice too large", 0.0);

    // strides for row-major flattening
    std::vector<long long> stride(size_t(q), 1);
    for (int i = q - 2; i >= 0; --i) stride[size_t(i)] = stride[size_t(i) + 1] * len[size_t(i) + 1];

    // per-amplitude jump weights factorize over components
    std::vector<std::vector<std::vector<double>>> w(static_cast<size_t>(k0));
    for (int j0 = 1; j0 <= k0; ++j0) {
        w[size_t(j0) - 1].resize(size_t(q));
        for (int i = 0; i < q; ++i)
            w[size_t(j0) - 1][size_t(i)] =
                gcp_pmf_vector(params.components[size_t(i)], double(j0), n_max[size_t(i)]).p;
    }
    const double mu = params.inner.total_rate();

    auto decode = [&](long long idx, std::vector<long>& out) {
        for (int i = 0; i < q; ++i) {
            out[size_t(i)] = long(idx / stride[size_t(i)]);
            idx %= stride[size_t(i)];
        }
    };

    std::vector<long> cell(static_cast<size_t>(q)), jump(static_cast<size_t>(q));
    auto deriv = [&](double, const std::vector<double>& y, std::vector<double>& dydt) {
        for (long long idx = 0; idx < cells; ++idx) {
            decode(idx, cell);
            double gain = 0.0;
            for (int j0 = 1; j0 <= k0; ++j0) {
                // convolve the factorized weights against y below this cell
                double conv = 0.0;
                std::fill(jump.begin(), jump.end(), 0L);
                for (;;) {
                    double wprod = 1.0;
                    long long src = 0;
                    for (int i = 0; i < q; ++i) {
                        wprod *= w[size_t(j0) - 1][size_t(i)][size_t(jump[size_t(i)])];
                        src += (cell[size_t(i)] - jump[size_t(i)]) * stride[size_t(i)];
                    }
                    conv += wprod * y[size_t(src)];
                    int pos = q - 1;
                    while (pos >= 0 && ++jump[size_t(pos)] > cell[size_t(pos)])
                        jump[size_t(pos--)] = 0;
                    if (pos < 0) break;
                }
                gain += params.inner.rates[size_t(j0) - 1] * conv;
            }
            dydt[size_t(idx)] = -mu * y[size_t(idx)] + gain;
        }
    };

    std::vector<double> y(size_t(cells), 0.0);
    y[0] = 1.0;
    double max_err = 0.0;
    double t = 0.0;
    for (int g = 1; g <= grid_points; ++g) {
        double t_next = t_end * double(g) / double(grid_points);
        integrate_adaptive(deriv, y, t, t_next, abs_tol);
        t = t_next;
        for (long long idx = 0; idx < cells; ++idx) {
            decode(idx, cell);
            max_err = std::max(max_err, std::abs(y[size_t(idx)] - mv_pmf(params, cell, t).value));
        }
    }
    return max_err;
}

double mv_levy_measure(const MvIgcpParams& params, const std::vector<long>& n) {
    if (n.size() != size_t(params.q()))
        throw std::invalid_argument("mv_levy_measure: n size mismatch");
    bool positive = false;
    for (long v : n) {
        if (v < 0) throw std::invalid_argument("mv_levy_measure: negative component");
        positive = positive || v > 0;
    }
    if (!positive) throw std::invalid_argument("mv_levy_measure: n must exceed the origin");
    double s = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0) {
        double prod = 1.0;
        for (int i = 0; i < params.q(); ++i)
            prod *= gcp_pmf(params.components[size_t(i)], n[size_t(i)], double(j0 + 1));
        s += params.inner.rates[j0] * prod;
    }
    return s;
}

double mv_covariance(const MvIgcpParams& params, int i, int l, double t) {
    if (i < 1 || i > params.q() || l < 1 || l > params.q())
        throw std::out_of_range("mv_covariance: component index");
    const GcpParams& ci = params.components[size_t(i) - 1];
    const GcpParams& cl = params.components[size_t(l) - 1];
    double cov = ci.mean_rate() * cl.mean_rate() * params.inner.second_moment_rate() * t;
    if (i == l) cov += params.inner.mean_rate() * t * ci.second_moment_rate();
    return cov;
}

std::complex<double> mv_codifference(const MvIgcpParams& params, int i, int l,
                                     std::complex<double> omega, double t) {
    if (i < 1 || i > params.q() || l < 1 || l > params.q())
        throw std::out_of_range("mv_codifference: component index");
    const GcpParams& ci = params.components[size_t(i) - 1];
    const GcpParams& cl = params.components[size_t(l) - 1];
    std::complex<double> a{0.0, 0.0}, b{0.0, 0.0};
    for (size_t j = 0; j < ci.rates.size(); ++j)
        a += ci.rates[j] * (std::exp(omega * double(j + 1)) - 1.0);
    for (size_t j = 0; j < cl.rates.size(); ++j)
        b += cl.rates[j] * (std::exp(-omega * double(j + 1)) - 1.0);
    std::complex<double> tau{0.0, 0.0};
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0) {
        double mu_j0 = params.inner.rates[j0];
        double j0v = double(j0 + 1);
        tau += mu_j0 * t * (2.0 - std::exp(j0v * a) - std::exp(j0v * b));
        if (i != l) tau -= mu_j0 * t * (1.0 - std::exp(j0v * (a + b)));
    }
    return tau;
}

std::vector<long> sample_mv_value(const MvIgcpParams& params, double t, RngStream& rng) {
    long m = sample_gcp_value(params.inner, t, rng);
    std::vector<long> out(size_t(params.q()), 0);
    if (m == 0) return out;
    for (int i = 0; i < params.q(); ++i)
        out[size_t(i)] = sample_gcp_value(params.components[size_t(i)], double(m), rng);
    return out;
}

}  // namespace igcp
