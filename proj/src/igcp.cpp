#include "igcp/igcp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "igcp/ode.hpp"

namespace igcp {

IgcpParams::IgcpParams(GcpParams out, GcpParams in)
    : outer(std::move(out)), inner(std::move(in)) {
    if (outer.rates.empty() || inner.rates.empty())
        throw std::invalid_argument("IgcpParams: both layers need rates");
}

double IgcpParams::s_constant() const { return outer.mean_rate() * inner.mean_rate(); }

double IgcpParams::t_constant() const {
    double a = outer.mean_rate();
    return a * a * inner.second_moment_rate() + outer.second_moment_rate() * inner.mean_rate();
}

std::vector<double> bell_mixture_weights(const std::vector<double>& inner_masses,
                                         double outer_total_rate, long z_max) {
    const int k0 = int(inner_masses.size());
    for (double m : inner_masses)
        if (m < 0.0) throw std::invalid_argument("bell_mixture_weights: negative inner mass");

    // fold the per-amplitude EGFs c_{j0}(r) = j0^r B_r(y_{j0}) / r!,
    // y_{j0} = mass_{j0} e^{-j0 L}
    std::vector<double> fold{1.0};
    for (int j0 = 1; j0 <= k0; ++j0) {
        double y = inner_masses[size_t(j0) - 1] * std::exp(-double(j0) * outer_total_rate);
        auto bell = bell_polynomial_table(int(z_max), y);
        std::vector<double> c(size_t(z_max) + 1);
        for (long r = 0; r <= z_max; ++r)
            c[size_t(r)] = std::exp(double(r) * std::log(double(j0)) - log_factorial(int(r))) *
                           bell[size_t(r)];
        std::vector<double> next(size_t(z_max) + 1, 0.0);
        for (size_t a = 0; a < fold.size(); ++a) {
            if (fold[a] == 0.0) continue;
            for (size_t b = 0; a + b <= size_t(z_max); ++b) next[a + b] += fold[a] * c[b];
        }
        fold = std::move(next);
    }
    double e0 = 0.0;
    for (int j0 = 1; j0 <= k0; ++j0)
        e0 -= inner_masses[size_t(j0) - 1] *
              (1.0 - std::exp(-double(j0) * outer_total_rate));
    e0 = std::exp(e0);
    std::vector<double> w(size_t(z_max) + 1);
    for (long z = 0; z <= z_max; ++z)
        w[size_t(z)] = e0 * std::exp(log_factorial(int(z))) * fold[size_t(z)];
    return w;
}

SeriesResult bell_form_pmf(const GcpParams& outer, const std::vector<double>& inner_masses,
                           long n, long long work_budget) {
    if (n < 0) return SeriesResult{0.0, 0, 0.0};
    const int k = outer.k();
    const int k0 = int(inner_masses.size());

    long long work = count_weighted_partitions(k, int(n)) * (n + 1) * k0;
    if (work > work_budget)
        throw budget_error("bell_form_pmf: partition/composition work exceeds budget", 0.0);

    std::vector<double> w = bell_mixture_weights(inner_masses, outer.total_rate(), n);

    double sum = 0.0;
    long terms = 0;
    for_each_weighted_partition(k, int(n), [&](const std::vector<int>& x) {
        double log_coef = 0.0;
        int z = 0;
        for (int j = 0; j < k; ++j) {
            if (x[size_t(j)] == 0) continue;
            z += x[size_t(j)];
            log_coef += x[size_t(j)] * std::log(outer.rates[size_t(j)]) - log_factorial(x[size_t(j)]);
        }
        sum += std::exp(log_coef) * w[size_t(z)];
        ++terms;
    });

    return SeriesResult{sum, terms, 1e-13 * std::max(sum, 1e-300)};
}

SeriesResult igcp_pmf(const IgcpParams& params, long n, double t, long long work_budget) {
    if (t < 0.0) throw std::domain_error("igcp_pmf: t < 0");
    std::vector<double> masses(params.inner.rates.size());
    for (size_t i = 0; i < masses.size(); ++i) masses[i] = params.inner.rates[i] * t;
    return bell_form_pmf(params.outer, masses, n, work_budget);
}

SeriesResult igcp_pmf_series_oracle(const IgcpParams& params, long n, double t, long s_max) {
    if (t < 0.0) throw std::domain_error("igcp_pmf_series_oracle: t < 0");
    if (n < 0) return SeriesResult{0.0, 0, 0.0};
    if (s_max < 0) s_max = gcp_default_truncation(params.inner, t) + 10;
    PmfVector inner_vec = gcp_pmf_vector(params.inner, t, s_max);
    double sum = 0.0;
    for (long s = 0; s <= s_max; ++s) {
        double w = inner_vec.at(s);
        if (w == 0.0) continue;
        double outer_p = (s == 0) ? (n == 0 ? 1.0 : 0.0)
                                  : gcp_pmf_vector(params.outer, double(s), n).at(n);
        sum += outer_p * w;
    }
    return SeriesResult{sum, s_max + 1, inner_vec.tail_bound + 1e-13};
}

PmfVector igcp_pmf_vector(const IgcpParams& params, double t, long n_max) {
    PmfVector out;
    out.p.assign(size_t(n_max) + 1, 0.0);
    double tails = 0.0;
    for (long n = 0; n <= n_max; ++n) {
        auto r = igcp_pmf(params, n, t);
        out.p[size_t(n)] = r.value;
        tails += r.tail_bound;
    }
    out.tail_bound = std::max(0.0, 1.0 - out.mass()) + tails;
    return out;
}

PmfVector igcp_pmf_vector(const IgcpParams& params, double t) {
    auto m = igcp_moments(params, t, t);
    long n_max = long(std::ceil(m.mean + 12.0 * std::sqrt(m.variance) + 20.0));
    return igcp_pmf_vector(params, t, n_max);
}

namespace {
double outer_exponent(const GcpParams& outer, double u) {
    // sum_j lambda_j (1 - u^j)
    double s = 0.0;
    for (size_t j = 0; j < outer.rates.size(); ++j)
        s += outer.rates[j] * (1.0 - std::pow(u, double(j + 1)));
    return s;
}
}  // namespace

double igcp_pgf(const IgcpParams& params, double u, double t) {
    if (std::abs(u) > 1.0) throw std::domain_error("igcp_pgf: |u| > 1");
    double theta = outer_exponent(params.outer, u);
    double s = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
        s += params.inner.rates[j0] * (1.0 - std::exp(-double(j0 + 1) * theta));
    return std::exp(-t * s);
}

double igcp_mgf(const IgcpParams& params, double u, double t) {
    double theta = 0.0;
    for (size_t j = 0; j < params.outer.rates.size(); ++j)
        theta += params.outer.rates[j] * (1.0 - std::exp(u * double(j + 1)));
    double s = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
        s += params.inner.rates[j0] * (1.0 - std::exp(-double(j0 + 1) * theta));
    return std::exp(-t * s);
}

double igcp_transition_rate(const IgcpParams& params, long m) {
    if (m < 0) throw std::invalid_argument("igcp_transition_rate: m < 0");
    if (m == 0) {
        double s = -params.inner.total_rate();
        for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
            s += params.inner.rates[j0] *
                 std::exp(-double(j0 + 1) * params.outer.total_rate());
        return s;
    }
    double s = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
        s += params.inner.rates[j0] * gcp_pmf(params.outer, m, double(j0 + 1));
    return s;
}

double igcp_levy_measure(const IgcpParams& params, long n) {
    if (n < 1) throw std::invalid_argument("igcp_levy_measure: n < 1");
    return igcp_transition_rate(params, n);
}

IgcpMoments igcp_moments(const IgcpParams& params, double s, double t) {
    if (!(0.0 <= s && s <= t)) throw std::invalid_argument("igcp_moments: need 0 <= s <= t");
    double S = params.s_constant(), T = params.t_constant();
    if (!(T >= S)) throw std::logic_error("igcp_moments: overdispersion violated");
    return IgcpMoments{S * t, T * t, T * s};
}

double igcp_ode_verify(const IgcpParams& params, long n_max, double t_end, int grid_points,
                       double abs_tol) {
    if (n_max < 0 || t_end <= 0.0 || grid_points < 1)
        throw std::invalid_argument("igcp_ode_verify: bad arguments");
    const int k0 = params.inner.k();
    // jump-size weights per inner amplitude: row j0 holds the outer pmf at
    // integer argument j0, truncated at n_max (exact for the states kept,
    // since probability only flows upward)
    std::vector<std::vector<double>> w(static_cast<size_t>(k0));
    for (int j0 = 1; j0 <= k0; ++j0)
        w[size_t(j0) - 1] = gcp_pmf_vector(params.outer, double(j0), n_max).p;
    const double mu = params.inner.total_rate();

    auto deriv = [&](double, const std::vector<double>& y, std::vector<double>& dydt) {
        for (long nn = 0; nn <= n_max; ++nn) {
            double gain = 0.0;
            for (int j0 = 1; j0 <= k0; ++j0) {
                const auto& row = w[size_t(j0) - 1];
                double conv = 0.0;
                for (long m = 0; m <= nn; ++m) conv += row[size_t(m)] * y[size_t(nn - m)];
                gain += params.inner.rates[size_t(j0) - 1] * conv;
            }
            dydt[size_t(nn)] = -mu * y[size_t(nn)] + gain;
        }
    };

    std::vector<double> y(size_t(n_max) + 1, 0.0);
    y[0] = 1.0;
    double max_err = 0.0;
    double t = 0.0;
    for (int g = 1; g <= grid_points; ++g) {
        double t_next = t_end * double(g) / double(grid_points);
        integrate_adaptive(deriv, y, t, t_next, abs_tol);
        t = t_next;
        for (long nn = 0; nn <= n_max; ++nn)
            max_err = std::max(max_err,
                               std::abs(y[size_t(nn)] - igcp_pmf(params, nn, t).value));
    }
    return max_err;
}

double first_passage_density(const IgcpParams& params, long n, double s, long r_max) {
    if (n < 1) throw std::invalid_argument("first_passage_density: n < 1");
    if (!(s > 0.0)) throw std::invalid_argument("first_passage_density: s <= 0");
    if (r_max < 0) r_max = gcp_default_truncation(params.inner, s);

    long long work = (r_max + 1) * (n + 1) * params.outer.k();
    if (work > 50000000)
        throw budget_error("first_passage_density: work budget exceeded", 0.0);

    // arrival rate of a size-m jump, m = 1..n
    std::vector<double> jump_rate(size_t(n) + 1, 0.0);
    for (long m = 1; m <= n; ++m) jump_rate[size_t(m)] = igcp_transition_rate(params, m);

    PmfVector inner_vec = gcp_pmf_vector(params.inner, s, r_max);
    double acc = 0.0;
    for (long r = 0; r <= r_max; ++r) {
        double pin = inner_vec.at(r);
        if (pin == 0.0) continue;
        // outer pmf at integer argument r, states 0..n-1
        PmfVector outer_at_r = (r == 0) ? PmfVector::point_mass_at_zero()
                                        : gcp_pmf_vector(params.outer, double(r), n - 1);
        for (long m = 1; m <= n; ++m) acc += jump_rate[size_t(m)] * outer_at_r.at(n - m) * pin;
    }
    return acc;
}

double first_passage_prob_finite(const IgcpParams& params) {
    const double lambda = params.outer.total_rate();
    const double mu = params.inner.total_rate();
    const double lambda1 = params.outer.rates[0];
    const int k0 = params.inner.k();

    // a_r = sum over walk lengths of Pr{amplitude walk hits r}; renewal
    // recursion over the inner amplitude distribution q_{j0} = mu_{j0}/mu
    double sum = 0.0;
    std::vector<double> a{1.0};
    double acc_r = 1.0;  // a_0 * e^{0}
    for (long r = 1; r < 2000; ++r) {
        double ar = 0.0;
        for (int j0 = 1; j0 <= std::min<long>(k0, r); ++j0)
            ar += params.inner.rates[size_t(j0) - 1] / mu * a[size_t(r - j0)];
        a.push_back(ar);
        double term = std::exp(-double(r) * lambda) * ar;
        acc_r += term;
        if (term < 1e-16 * acc_r) break;
    }
    for (int j0 = 1; j0 <= k0; ++j0)
        sum += params.inner.rates[size_t(j0) - 1] / mu * double(j0) * lambda1 *
               std::exp(-double(j0) * lambda);
    return sum * acc_r;
}

double martingale_residual(long path_value, const IgcpParams& params, double t) {
    return double(path_value) - params.s_constant() * t;
}

double exponential_martingale(long path_value, const IgcpParams& params, double u, double t) {
    double theta = 0.0;
    for (size_t j = 0; j < params.outer.rates.size(); ++j)
        theta += params.outer.rates[j] * (1.0 - std::exp(u * double(j + 1)));
    double comp = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
        comp += params.inner.rates[j0] * (std::exp(-double(j0 + 1) * theta) - 1.0);
    return std::exp(u * double(path_value) - t * comp);
}

FractionalIntegralMoments fractional_integral_moments(const IgcpParams& params, double alpha,
                                                      double t) {
    if (!(alpha > 0.0)) throw std::domain_error("fractional_integral_moments: alpha <= 0");
    if (t < 0.0) throw std::domain_error("fractional_integral_moments: t < 0");
    double S = params.s_constant(), T = params.t_constant();
    FractionalIntegralMoments m;
    m.mean = S * std::pow(t, alpha + 1.0) / std::tgamma(alpha + 2.0);
    double g1 = std::tgamma(alpha + 1.0);
    m.variance = T * std::pow(t, 2.0 * alpha + 1.0) / ((2.0 * alpha + 1.0) * g1 * g1);
    m.cov_with_process = (alpha == 1.0) ? T * t * t / 2.0 : std::nan("");
    return m;
}

SeriesResult fractional_integral_conditional_mean(const IgcpParams& params, double alpha,
                                                  double t, long n, long long work_budget) {
    if (!(alpha > 0.0)) throw std::domain_error("fractional_integral_conditional_mean: alpha <= 0");
    if (n < 0) throw std::invalid_argument("fractional_integral_conditional_mean: n < 0");
    if (t == 0.0) return SeriesResult{0.0, 0, 0.0};
    double p_n = igcp_pmf(params, n, t).value;
    if (!(p_n > 0.0))
        throw std::invalid_argument("fractional_integral_conditional_mean: pmf vanishes at n");
    if (n == 0) return SeriesResult{0.0, 1, 0.0};

    const int k0 = params.inner.k();
    const double mu = params.inner.total_rate();
    long x_max = gcp_default_truncation(params.inner, t) + 10;

    long long work = (n + 1) * (x_max + 1) * (x_max + 1);
    if (work > work_budget)
        throw budget_error("fractional_integral_conditional_mean: budget exceeded", 0.0);

    // F[state][z]: outer pmf at inner argument x, weighted by the z-part
    // masses of the inner layer, summed over x
    std::vector<std::vector<double>> F(size_t(n) + 1,
                                       std::vector<double>(size_t(x_max) + 1, 0.0));
    for (long x = 0; x <= x_max; ++x) {
        PmfVector outer_at_x = (x == 0) ? PmfVector::point_mass_at_zero()
                                        : gcp_pmf_vector(params.outer, double(x), n);
        // bin the inner partition masses of x by part count z
        std::vector<double> pz(size_t(x) + 1, 0.0);
        for_each_weighted_partition(k0, int(x), [&](const std::vector<int>& parts) {
            double log_w = 0.0;
            int z = 0;
            for (int j0 = 0; j0 < k0; ++j0) {
                int c = parts[size_t(j0)];
                if (c == 0) continue;
                z += c;
                log_w += c * std::log(params.inner.rates[size_t(j0)] * t) - log_factorial(c);
            }
            pz[size_t(z)] += std::exp(log_w);
        });
        for (long state = 0; state <= n; ++state) {
            double po = outer_at_x.at(state);
            if (po == 0.0) continue;
            for (long z = 0; z <= x; ++z) F[size_t(state)][size_t(z)] += po * pz[size_t(z)];
        }
    }

    const double log_gamma_alpha = std::lgamma(alpha);
    double total = 0.0;
    for (long state = 1; state <= n; ++state) {
        const auto& f1 = F[size_t(state)];
        const auto& f2 = F[size_t(n - state)];
        double part = 0.0;
        for (long z = 0; z <= x_max; ++z) {
            if (f1[size_t(z)] == 0.0) continue;
            for (long l = 0; l <= x_max; ++l) {
                if (f2[size_t(l)] == 0.0) continue;
                double log_beta = std::lgamma(double(z) + 1.0) + std::lgamma(alpha + double(l)) -
                                  std::lgamma(double(z) + alpha + double(l) + 1.0);
                part += f1[size_t(z)] * f2[size_t(l)] * std::exp(log_beta);
            }
        }
        total += double(state) * part;
    }
    double value = std::exp(-mu * t) * std::pow(t, alpha) / std::exp(log_gamma_alpha) * total / p_n;

    double inner_tail = gcp_pmf_vector(params.inner, t, x_max).tail_bound;
    double tail = 2.0 * double(n) * std::pow(t, alpha) * std::exp(mu * t) /
                  (alpha * std::exp(log_gamma_alpha) * p_n) * inner_tail;
    return SeriesResult{value, (x_max + 1) * (n + 1), tail};
}

SeriesResult nh_igcp_pmf(const GcpParams& outer, const RateSchedule& schedule, long n, double t,
                         long long work_budget) {
    std::vector<double> masses(static_cast<size_t>(schedule.k0()));
    for (int j0 = 1; j0 <= schedule.k0(); ++j0)
        masses[size_t(j0) - 1] = schedule.cumulative(j0, t);
    return bell_form_pmf(outer, masses, n, work_budget);
}

Moments nh_igcp_moments(const GcpParams& outer, const RateSchedule& schedule, double t) {
    double rho1 = 0.0, rho2 = 0.0;
    for (int j0 = 1; j0 <= schedule.k0(); ++j0) {
        double rho = schedule.cumulative(j0, t);
        rho1 += double(j0) * rho;
        rho2 += double(j0) * double(j0) * rho;
    }
    double a = outer.mean_rate();
    return Moments{a * rho1, a * a * rho2 + outer.second_moment_rate() * rho1};
}

double nh_first_passage_cdf(const GcpParams& outer, const RateSchedule& schedule, long n,
                            double t) {
    if (n < 1) throw std::invalid_argument("nh_first_passage_cdf: n < 1");
    double below = 0.0;
    for (long m = 0; m < n; ++m) below += nh_igcp_pmf(outer, schedule, m, t).value;
    return 1.0 - below;
}

SeriesResult nh_increment_pmf(const GcpParams& outer, const RateSchedule& schedule, long n,
                              double t, double v, long long work_budget) {
    if (v < 0.0 || t < 0.0) throw std::domain_error("nh_increment_pmf: negative time");
    std::vector<double> masses(static_cast<size_t>(schedule.k0()));
    for (int j0 = 1; j0 <= schedule.k0(); ++j0)
        masses[size_t(j0) - 1] = schedule.cumulative_between(j0, v, t + v);
    return bell_form_pmf(outer, masses, n, work_budget);
}

long sample_igcp_value(const IgcpParams& params, double t, RngStream& rng) {
    long m = sample_gcp_value(params.inner, t, rng);
    return m == 0 ? 0 : sample_gcp_value(params.outer, double(m), rng);
}

GcpPath sample_igcp_path(const IgcpParams& params, double horizon, RngStream& rng) {
    GcpPath inner_path = sample_gcp_path(params.inner, horizon, rng);
    GcpPath path;
    path.horizon = horizon;
    for (size_t i = 0; i < inner_path.event_times.size(); ++i) {
        long jump = sample_gcp_value(params.outer, double(inner_path.jump_sizes[i]), rng);
        if (jump > 0) {
            path.event_times.push_back(inner_path.event_times[i]);
            path.jump_sizes.push_back(jump);
        }
    }
    return path;
}

long sample_nh_igcp_value(const GcpParams& outer, const RateSchedule& schedule, double t,
                          RngStream& rng) {
    long m = sample_nh_gcp_value(schedule, t, rng);
    return m == 0 ? 0 : sample_gcp_value(outer, double(m), rng);
}

long sample_nh_increment_value(const GcpParams& outer, const RateSchedule& schedule, double t,
                               double v, RngStream& rng) {
    long m = 0;
    for (int j0 = 1; j0 <= schedule.k0(); ++j0)
        m += long(j0) * rng.poisson(schedule.cumulative_between(j0, v, t + v));
    return m == 0 ? 0 : sample_gcp_value(outer, double(m), rng);
}

}  // namespace igcp
