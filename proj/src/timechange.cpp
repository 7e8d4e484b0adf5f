#include "igcp/timechange.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace igcp {

StableParams::StableParams(double a) : alpha(a) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("StableParams: alpha not in (0,1)");
}

double TcIgcpParams::r_constant() const {
    double s = base.s_constant();
    double a = stable.alpha;
    return s * s * (2.0 / std::tgamma(2.0 * a + 1.0) -
                    1.0 / (std::tgamma(a + 1.0) * std::tgamma(a + 1.0)));
}

double sample_inverse_stable(const StableParams& stable, double t, RngStream& rng) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_inverse_stable: t <= 0");
    return std::pow(t, stable.alpha) * std::pow(rng.positive_stable(stable.alpha), -stable.alpha);
}

std::vector<double> sample_inverse_stable_joint(const StableParams& stable,
                                                const std::vector<double>& times,
                                                RngStream& rng, double dx) {
    if (times.empty()) throw std::invalid_argument("sample_inverse_stable_joint: no times");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("sample_inverse_stable_joint: times not increasing");
    if (!(times.front() > 0.0))
        throw std::invalid_argument("sample_inverse_stable_joint: times must be positive");
    if (!(dx > 0.0)) throw std::invalid_argument("sample_inverse_stable_joint: dx <= 0");

    std::vector<double> out(times.size(), 0.0);
    const double step_scale = std::pow(dx, 1.0 / stable.alpha);
    double x = 0.0, d = 0.0;
    size_t next = 0;
    while (next < times.size()) {
        x += dx;
        d += step_scale * rng.positive_stable(stable.alpha);
        while (next < times.size() && d > times[next]) out[next++] = x;
    }
    return out;
}

double ml_alpha_derivative(double alpha, long z, double x) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("ml_alpha_derivative: alpha");
    if (z < 0) throw std::invalid_argument("ml_alpha_derivative: z < 0");
    if (x < 0.0) throw std::domain_error("ml_alpha_derivative: x < 0");
    if (x == 0.0)
        return std::exp(log_factorial(int(z)) - std::lgamma(alpha * double(z) + 1.0));

    // sum_j (-x)^j (z+j)! / (j! Gamma(alpha (z+j) + 1)) in extended precision;
    // the alternating terms can exceed the result, so track the cancellation
    // and refuse to return digits that are not there
    long double sum = 0.0L, comp = 0.0L, peak = 0.0L;
    const long double lx = std::log((long double)x);
    for (long j = 0; j < 40000; ++j) {
        long double log_abs = lgammal((long double)(z + j) + 1.0L) -
                              lgammal((long double)j + 1.0L) -
                              lgammal((long double)alpha * (z + j) + 1.0L) + j * lx;
        long double term = expl(log_abs);
        peak = std::max(peak, term);
        if (j & 1) term = -term;
        long double y = term - comp;
        long double t2 = sum + y;
        comp = (t2 - sum) - y;
        sum = t2;
        if (j > 4 && expl(log_abs) < 1e-26L * std::max(fabsl(sum), (long double)1e-300L) &&
            expl(log_abs) < peak)
            break;
    }
    long double rel_loss = peak * 1e-18L / std::max(fabsl(sum), (long double)1e-300L);
    if (rel_loss > 1e-6L)
        throw truncation_error("ml_alpha_derivative: cancellation exhausts precision",
                               double(sum), z);
    return double(sum);
}

namespace {

std::vector<double> ml_alpha_derivative_table(double alpha, long z_max, double x) {
    std::vector<double> w(size_t(z_max) + 1);
    for (long z = 0; z <= z_max; ++z) w[size_t(z)] = ml_alpha_derivative(alpha, z, x);
    return w;
}

// Stirling numbers of the second kind up to row n_max, dense doubles
std::vector<std::vector<double>> stirling2_table(long n_max) {
    std::vector<std::vector<double>> s(size_t(n_max) + 1);
    s[0] = {1.0};
    for (long n = 1; n <= n_max; ++n) {
        s[size_t(n)].assign(size_t(n) + 1, 0.0);
        for (long m = 1; m <= n; ++m) {
            double carry = (m <= n - 1) ? s[size_t(n) - 1][size_t(m)] : 0.0;
            s[size_t(n)][size_t(m)] = double(m) * carry + s[size_t(n) - 1][size_t(m) - 1];
        }
    }
    return s;
}

}  // namespace

SeriesResult gfcp_pmf(const GcpParams& params, double alpha, long m, double t) {
    if (m < 0) return SeriesResult{0.0, 0, 0.0};
    if (t < 0.0) throw std::domain_error("gfcp_pmf: t < 0");
    if (t == 0.0) return SeriesResult{m == 0 ? 1.0 : 0.0, 0, 0.0};
    const int k0 = params.k();
    const double mu = params.total_rate();
    const double ta = std::pow(t, alpha);

    // weights r! E^{r+1}_{alpha, alpha r + 1}(-mu t^alpha) per part count r
    std::vector<double> ml = ml_alpha_derivative_table(alpha, m, mu * ta);

    double sum = 0.0;
    long terms = 0;
    for_each_weighted_partition(k0, int(m), [&](const std::vector<int>& x) {
        double log_coef = 0.0;
        int r = 0;
        for (int j0 = 0; j0 < k0; ++j0) {
            int c = x[size_t(j0)];
            if (c == 0) continue;
            r += c;
            log_coef += c * std::log(params.rates[size_t(j0)] * ta) - log_factorial(c);
        }
        sum += std::exp(log_coef) * ml[size_t(r)];
        ++terms;
    });
    return SeriesResult{sum, terms, 1e-9 * std::max(sum, 1e-300)};
}

SeriesResult tc_igcp_pgf(const TcIgcpParams& params, double u, double t) {
    if (std::abs(u) > 1.0) throw std::domain_error("tc_igcp_pgf: |u| > 1");
    const double ta = std::pow(t, params.stable.alpha);
    double theta = 0.0;
    for (size_t j = 0; j < params.base.outer.rates.size(); ++j)
        theta += params.base.outer.rates[j] * (std::pow(u, double(j + 1)) - 1.0);
    double arg = 0.0;
    for (size_t j0 = 0; j0 < params.base.inner.rates.size(); ++j0)
        arg += params.base.inner.rates[j0] * ta * (std::exp(double(j0 + 1) * theta) - 1.0);
    return mittag_leffler_3p(params.stable.alpha, 1.0, 1.0, arg);
}

namespace {

// Mixture kernel g(z_k) of the fractional-clock state probabilities. The
// x-lattice of the closed form resums exactly: expanding each Bell factor in
// Stirling numbers turns the lattice into damped clock moments
//   w(m) = m! E^{m+1}_{alpha, alpha m + 1}(-x),  x = sum_j0 mu_j0 t^alpha (1 - e^{-j0 L}),
// so the kernel is a finite positive sum with no truncation error beyond the
// w evaluations themselves.
struct TcKernel {
    std::vector<double> g;
    std::vector<double> g_tail;
};

TcKernel tc_kernel(const TcIgcpParams& params, double t, long z_max, long long work_budget) {
    const GcpParams& outer = params.base.outer;
    const GcpParams& inner = params.base.inner;
    const double alpha = params.stable.alpha;
    const int k0 = inner.k();
    const double lambda = outer.total_rate();
    const double ta = std::pow(t, alpha);

    if (z_max > 170)
        throw budget_error("tc_kernel: state beyond double-precision Stirling range", 0.0);
    long long work = 1;
    for (int j0 = 0; j0 < k0; ++j0) work *= z_max + 1;
    if (work * (z_max + 1) > work_budget)
        throw budget_error("tc_kernel: composition work exceeds budget", 0.0);

    std::vector<double> y(static_cast<size_t>(k0));
    double x_damped = 0.0;
    for (int j0 = 1; j0 <= k0; ++j0) {
        double rate = inner.rates[size_t(j0) - 1];
        y[size_t(j0) - 1] = rate * ta * std::exp(-double(j0) * lambda);
        x_damped += rate * ta * (1.0 - std::exp(-double(j0) * lambda));
    }

    std::vector<double> w = ml_alpha_derivative_table(alpha, z_max, x_damped);
    auto stirling = stirling2_table(z_max);

    // per amplitude, the Stirling-weighted moment mix of one Bell factor:
    // b_{j0}(r) = sum_m S(r, m) y_{j0}^m w(m) replaced under the fold by
    // tracking the full moment index; fold EGF coefficients jointly in
    // (part count r, moment order m)
    // c_{j0}[r][m] = (j0^r / r!) S(r, m) y_{j0}^m
    std::vector<std::vector<std::vector<double>>> c(static_cast<size_t>(k0));
    for (int j0 = 1; j0 <= k0; ++j0) {
        auto& cj = c[size_t(j0) - 1];
        cj.assign(size_t(z_max) + 1, {});
        double yj = y[size_t(j0) - 1];
        for (long r = 0; r <= z_max; ++r) {
            cj[size_t(r)].assign(size_t(r) + 1, 0.0);
            double scale = std::exp(double(r) * std::log(double(j0)) - log_factorial(int(r)));
            double ypow = 1.0;
            for (long m = 0; m <= r; ++m) {
                cj[size_t(r)][size_t(m)] = scale * stirling[size_t(r)][size_t(m)] * ypow;
                ypow *= yj;
            }
        }
    }

    // fold over amplitudes: F[r][m] = sum over compositions of r with moment
    // orders summing to m
    std::vector<std::vector<double>> fold(size_t(z_max) + 1);
    fold[0] = {1.0};
    for (long r = 1; r <= z_max; ++r) fold[size_t(r)] = {};
    for (int j0 = 1; j0 <= k0; ++j0) {
        std::vector<std::vector<double>> next(size_t(z_max) + 1);
        for (long r = 0; r <= z_max; ++r) next[size_t(r)].assign(size_t(r) + 1, 0.0);
        for (long ra = 0; ra <= z_max; ++ra) {
            if (fold[size_t(ra)].empty()) continue;
            for (long rb = 0; ra + rb <= z_max; ++rb) {
                const auto& cb = c[size_t(j0) - 1][size_t(rb)];
                for (size_t ma = 0; ma < fold[size_t(ra)].size(); ++ma) {
                    double va = fold[size_t(ra)][ma];
                    if (va == 0.0) continue;
                    for (size_t mb = 0; mb < cb.size(); ++mb)
                        next[size_t(ra + rb)][ma + mb] += va * cb[mb];
                }
            }
        }
        fold = std::move(next);
    }

    TcKernel kernel;
    kernel.g.assign(size_t(z_max) + 1, 0.0);
    kernel.g_tail.assign(size_t(z_max) + 1, 0.0);
    for (long z = 0; z <= z_max; ++z) {
        double acc = 0.0;
        for (size_t m = 0; m < fold[size_t(z)].size(); ++m)
            acc += fold[size_t(z)][m] * w[m];
        acc *= std::exp(log_factorial(int(z)));
        kernel.g[size_t(z)] = acc;
        kernel.g_tail[size_t(z)] = 1e-9 * std::max(acc, 1e-300);
    }
    return kernel;
}

SeriesResult tc_state_probability(const GcpParams& outer, const TcKernel& kernel, long n) {
    double sum = 0.0, tail = 0.0;
    long terms = 0;
    for_each_weighted_partition(outer.k(), int(n), [&](const std::vector<int>& x) {
        double log_coef = 0.0;
        int zk = 0;
        for (int j = 0; j < outer.k(); ++j) {
            int cnt = x[size_t(j)];
            if (cnt == 0) continue;
            zk += cnt;
            log_coef += cnt * std::log(outer.rates[size_t(j)]) - log_factorial(cnt);
        }
        double coef = std::exp(log_coef);
        sum += coef * kernel.g[size_t(zk)];
        tail += coef * kernel.g_tail[size_t(zk)];
        ++terms;
    });
    return SeriesResult{sum, terms, tail + 1e-13};
}

}  // namespace

SeriesResult tc_igcp_pmf(const TcIgcpParams& params, long n, double t, long long work_budget) {
    if (n < 0) return SeriesResult{0.0, 0, 0.0};
    if (t < 0.0) throw std::domain_error("tc_igcp_pmf: t < 0");
    if (t == 0.0) return SeriesResult{n == 0 ? 1.0 : 0.0, 0, 0.0};
    TcKernel kernel = tc_kernel(params, t, n, work_budget);
    return tc_state_probability(params.base.outer, kernel, n);
}

PmfVector tc_igcp_pmf_vector(const TcIgcpParams& params, double t, long n_max,
                             long long work_budget) {
    PmfVector out;
    out.p.assign(size_t(n_max) + 1, 0.0);
    if (t == 0.0) {
        out.p[0] = 1.0;
        return out;
    }
    TcKernel kernel = tc_kernel(params, t, n_max, work_budget);
    double tails = 0.0;
    for (long n = 0; n <= n_max; ++n) {
        auto r = tc_state_probability(params.base.outer, kernel, n);
        out.p[size_t(n)] = r.value;
        tails += r.tail_bound;
    }
    out.tail_bound = std::max(0.0, 1.0 - out.mass()) + tails;
    return out;
}

SeriesResult tc_igcp_pmf_oracle(const TcIgcpParams& params, long n, double t, long m_max) {
    if (n < 0) return SeriesResult{0.0, 0, 0.0};
    if (t == 0.0) return SeriesResult{n == 0 ? 1.0 : 0.0, 0, 0.0};
    const double alpha = params.stable.alpha;
    if (m_max < 0) {
        // fractional inner layer: mean and variance from the inverse-clock
        // moments, generous cut
        double ta = std::pow(t, alpha);
        double mean = params.base.inner.mean_rate() * ta / std::tgamma(alpha + 1.0);
        double m2 = params.base.inner.mean_rate();
        double r_in = m2 * m2 * ta * ta *
                          (2.0 / std::tgamma(2.0 * alpha + 1.0) -
                           1.0 / (std::tgamma(alpha + 1.0) * std::tgamma(alpha + 1.0))) +
                      params.base.inner.second_moment_rate() * ta / std::tgamma(alpha + 1.0);
        m_max = long(std::ceil(mean + 14.0 * std::sqrt(r_in) + 60.0));
    }
    // shared Mittag-Leffler weights across the whole conditioning series
    const GcpParams& inner = params.base.inner;
    const double ta = std::pow(t, alpha);
    const double mu = inner.total_rate();
    std::vector<double> ml(size_t(m_max) + 1);
    for (long r = 0; r <= m_max; ++r) ml[size_t(r)] = ml_alpha_derivative(alpha, r, mu * ta);

    double sum = 0.0, covered = 0.0;
    for (long m = 0; m <= m_max; ++m) {
        double w = 0.0;
        for_each_weighted_partition(inner.k(), int(m), [&](const std::vector<int>& x) {
            double log_coef = 0.0;
            int r = 0;
            for (int j0 = 0; j0 < inner.k(); ++j0) {
                int cnt = x[size_t(j0)];
                if (cnt == 0) continue;
                r += cnt;
                log_coef += cnt * std::log(inner.rates[size_t(j0)] * ta) - log_factorial(cnt);
            }
            w += std::exp(log_coef) * ml[size_t(r)];
        });
        covered += w;
        double outer_p = (m == 0) ? (n == 0 ? 1.0 : 0.0)
                                  : gcp_pmf_vector(params.base.outer, double(m), n).at(n);
        sum += outer_p * w;
    }
    return SeriesResult{sum, m_max + 1, std::max(0.0, 1.0 - covered) + 1e-9};
}

double tc_fractional_ode_residual(const TcIgcpParams& params, long n_max,
                                  const std::vector<double>& t_grid) {
    if (t_grid.size() < 4 || t_grid.front() != 0.0)
        throw std::invalid_argument("tc_fractional_ode_residual: grid must start at 0");
    const size_t g = t_grid.size();
    const double h = t_grid[1] - t_grid[0];
    for (size_t i = 1; i < g; ++i)
        if (std::abs(t_grid[i] - t_grid[i - 1] - h) > 1e-9 * h)
            throw std::invalid_argument("tc_fractional_ode_residual: grid not uniform");
    const double alpha = params.stable.alpha;
    const double mu = params.base.inner.total_rate();
    const int k0 = params.base.inner.k();

    // pmf table over the grid, sharing kernels per time point
    std::vector<std::vector<double>> q(size_t(n_max) + 1, std::vector<double>(g));
    for (size_t i = 0; i < g; ++i) {
        PmfVector col = tc_igcp_pmf_vector(params, t_grid[i], n_max);
        for (long n = 0; n <= n_max; ++n) q[size_t(n)][i] = col.at(n);
    }

    // jump weights of the embedded integer-order system
    std::vector<std::vector<double>> w(static_cast<size_t>(k0));
    for (int j0 = 1; j0 <= k0; ++j0)
        w[size_t(j0) - 1] = gcp_pmf_vector(params.base.outer, double(j0), n_max).p;

    const double scale = std::pow(h, -alpha) / std::tgamma(2.0 - alpha);
    double max_res = 0.0;
    for (long n = 0; n <= n_max; ++n) {
        for (size_t i = g / 2; i < g; ++i) {
            // L1 discretization of the fractional derivative at t_i
            double l1 = 0.0;
            for (size_t j = 0; j < i; ++j) {
                double wj = std::pow(double(j + 1), 1.0 - alpha) - std::pow(double(j), 1.0 - alpha);
                l1 += wj * (q[size_t(n)][i - j] - q[size_t(n)][i - j - 1]);
            }
            l1 *= scale;
            double rhs = -mu * q[size_t(n)][i];
            for (int j0 = 1; j0 <= k0; ++j0) {
                double conv = 0.0;
                for (long m = 0; m <= n; ++m)
                    conv += w[size_t(j0) - 1][size_t(m)] * q[size_t(n - m)][i];
                rhs += params.base.inner.rates[size_t(j0) - 1] * conv;
            }
            max_res = std::max(max_res, std::abs(l1 - rhs));
        }
    }
    return max_res;
}

Moments tc_igcp_moments(const TcIgcpParams& params, double t) {
    if (t < 0.0) throw std::domain_error("tc_igcp_moments: t < 0");
    if (t == 0.0) return Moments{0.0, 0.0};
    const double alpha = params.stable.alpha;
    double ta = std::pow(t, alpha);
    double mean = params.base.s_constant() * ta / std::tgamma(alpha + 1.0);
    double var = params.r_constant() * ta * ta +
                 params.base.t_constant() * ta / std::tgamma(alpha + 1.0);
    return Moments{mean, var};
}

double tc_covariance_asymptotic(const TcIgcpParams& params, double s, double t) {
    if (!(0.0 < s && s <= t)) throw std::invalid_argument("tc_covariance_asymptotic: need 0 < s <= t");
    const double alpha = params.stable.alpha;
    double g1 = std::tgamma(alpha + 1.0);
    double beta_term = std::tgamma(alpha) * std::tgamma(alpha + 1.0) / std::tgamma(2.0 * alpha + 1.0);
    double S = params.base.s_constant(), T = params.base.t_constant();
    return T * std::pow(s, alpha) / g1 +
           S * S / (g1 * g1) *
               (alpha * std::pow(s, 2.0 * alpha) * beta_term -
                alpha * alpha / (alpha + 1.0) * std::pow(s, alpha + 1.0) *
                    std::pow(t, alpha - 1.0));
}

double lrd_exponent(const TcIgcpParams& params, double s, const std::vector<double>& t_grid) {
    if (t_grid.size() < 2) throw std::invalid_argument("lrd_exponent: need at least two grid points");
    for (double t : t_grid)
        if (!(t > s)) throw std::invalid_argument("lrd_exponent: grid must exceed s");
    double var_s = tc_igcp_moments(params, s).variance;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    size_t n = t_grid.size();
    for (double t : t_grid) {
        double corr = tc_covariance_asymptotic(params, s, t) /
                      std::sqrt(var_s * tc_igcp_moments(params, t).variance);
        double x = std::log(t), yv = std::log(corr);
        sx += x; sy += yv; sxx += x * x; sxy += x * yv;
    }
    double denom = double(n) * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw std::invalid_argument("lrd_exponent: degenerate grid");
    double slope = (double(n) * sxy - sx * sy) / denom;
    return -slope;
}

SrdReport srd_increment_diagnostic(const TcIgcpParams& params, double h, double s,
                                   const std::vector<double>& t_grid, const McConfig& config,
                                   double dx) {
    if (!(h > 0.0)) throw std::invalid_argument("srd_increment_diagnostic: h <= 0");
    for (double t : t_grid)
        if (!(t > s + h)) throw std::invalid_argument("srd_increment_diagnostic: grid too close to s");

    SrdReport report;
    report.t_grid = t_grid;
    bool usable = true;
    uint64_t base = 0;
    for (double t : t_grid) {
        std::vector<double> times{s, s + h, t, t + h};
        auto sums = run_blocked<5>(
            [&](RngStream& stream) -> std::array<double, 5> {
                auto yv = sample_inverse_stable_joint(params.stable, times, stream, dx);
                double z1 = double(sample_igcp_value(params.base, yv[1] - yv[0], stream));
                double z2 = double(sample_igcp_value(params.base, yv[3] - yv[2], stream));
                return {z1, z2, z1 * z1, z2 * z2, z1 * z2};
            },
            config.samples, config.master_seed, config.workers, base);
        base += uint64_t(config.samples);
        double n = double(config.samples);
        double m1 = sums[0] / n, m2 = sums[1] / n;
        double v1 = sums[2] / n - m1 * m1, v2 = sums[3] / n - m2 * m2;
        double corr = (v1 > 0.0 && v2 > 0.0) ? (sums[4] / n - m1 * m2) / std::sqrt(v1 * v2)
                                             : 0.0;
        report.correlations.push_back(corr);
        double corr_se = (1.0 - corr * corr) / std::sqrt(n);
        if (!(corr > 0.0) || corr_se > 0.6 * std::abs(corr)) usable = false;
    }
    if (!usable) {
        report.conclusive = false;
        report.exponent = std::nan("");
        return report;
    }
    // least-squares decay exponent with a regression-based interval
    size_t n = t_grid.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double x = std::log(t_grid[i]), yv = std::log(report.correlations[i]);
        sx += x; sy += yv; sxx += x * x; sxy += x * yv;
    }
    double denom = double(n) * sxx - sx * sx;
    double slope = (double(n) * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / double(n);
    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double x = std::log(t_grid[i]);
        double r = std::log(report.correlations[i]) - (intercept + slope * x);
        rss += r * r;
    }
    double se = (n > 2) ? std::sqrt(rss / double(n - 2) / (sxx - sx * sx / double(n))) : 0.0;
    report.exponent = -slope;
    report.ci_low = -slope - 2.0 * se;
    report.ci_high = -slope + 2.0 * se;
    report.conclusive = true;
    return report;
}

SeriesResult tc_factorial_moment(const TcIgcpParams& params, int r, double t,
                                 long long work_budget) {
    if (r < 1) throw std::invalid_argument("tc_factorial_moment: r < 1");
    if (t < 0.0) throw std::domain_error("tc_factorial_moment: t < 0");
    if (t == 0.0) return SeriesResult{0.0, 0, 0.0};
    const GcpParams& outer = params.base.outer;
    const GcpParams& inner = params.base.inner;
    const double alpha = params.stable.alpha;
    const int k = outer.k(), k0 = inner.k();
    if (static_cast<long long>(r) * r * k * k0 > work_budget)
        throw budget_error("tc_factorial_moment: budget exceeded", 0.0);

    // phi(x) = sum_j lambda_j (j)_x / x!, the x-th Taylor weight of the outer
    // exponent at u = 1; zero beyond x = k. A slot differentiated zero times
    // contributes nothing because the exponent vanishes at u = 1, so the
    // compositions below run over strictly positive parts.
    std::vector<double> phi(size_t(k) + 1, 0.0);
    for (int x = 1; x <= k; ++x)
        for (int j = x; j <= k; ++j)
            phi[size_t(x)] += outer.rates[size_t(j) - 1] * double(falling_factorial(j, x)) /
                              std::exp(log_factorial(x));

    // conv_s[m] = sum over compositions of m into s parts from [1..k] of
    // prod phi(x_i)
    std::vector<std::vector<double>> conv(size_t(r) + 1, std::vector<double>(size_t(r) + 1, 0.0));
    conv[0][0] = 1.0;
    for (int s = 1; s <= r; ++s)
        for (int m = s; m <= r; ++m)
            for (int x = 1; x <= std::min(k, m - s + 1); ++x)
                conv[size_t(s)][size_t(m)] += conv[size_t(s) - 1][size_t(m - x)] * phi[size_t(x)];

    // psi(m): m-th derivative weight of the inner exponential layer at u = 1
    std::vector<double> psi(size_t(r) + 1, 0.0);
    for (int m = 1; m <= r; ++m)
        for (int j0 = 1; j0 <= k0; ++j0) {
            double acc = 0.0;
            for (int s = 1; s <= m; ++s)
                acc += std::exp(double(s) * std::log(double(j0)) - log_factorial(s)) *
                       conv[size_t(s)][size_t(m)];
            psi[size_t(m)] += inner.rates[size_t(j0) - 1] * acc;
        }

    double total = 0.0;
    double r_fact = std::exp(log_factorial(r));
    for (int nn = 1; nn <= r; ++nn) {
        // compositions of r into nn positive parts
        double comp_sum = 0.0;
        for_each_composition(r - nn, nn, [&](const std::vector<int>& extras) {
            double prod = 1.0;
            for (int l = 0; l < nn; ++l) prod *= psi[size_t(extras[size_t(l)]) + 1];
            comp_sum += prod;
        });
        total += r_fact / std::tgamma(double(nn) * alpha + 1.0) *
                 std::pow(t, double(nn) * alpha) * comp_sum;
    }
    return SeriesResult{total, r, 1e-13 * std::max(total, 1e-300)};
}

long sample_tc_igcp_value(const TcIgcpParams& params, double t, RngStream& rng) {
    if (t == 0.0) return 0;
    double y = sample_inverse_stable(params.stable, t, rng);
    return sample_igcp_value(params.base, y, rng);
}

}  // namespace igcp
