#include "igcp/compound.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace igcp {

JumpLaw JumpLaw::point_mass(double a) {
    if (a < 0.0) throw std::invalid_argument("JumpLaw::point_mass: negative location");
    return JumpLaw(Kind::point_mass, a, GcpParams(), PmfVector());
}

JumpLaw JumpLaw::geometric(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("JumpLaw::geometric: p not in (0,1]");
    return JumpLaw(Kind::geometric, p, GcpParams(), PmfVector());
}

JumpLaw JumpLaw::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("JumpLaw::exponential: rate <= 0");
    return JumpLaw(Kind::exponential, rate, GcpParams(), PmfVector());
}

JumpLaw JumpLaw::gcp_unit(GcpParams params) {
    return JumpLaw(Kind::gcp_unit, 0.0, std::move(params), PmfVector());
}

JumpLaw JumpLaw::explicit_discrete(PmfVector pmf) {
    if (pmf.p.empty()) throw std::invalid_argument("JumpLaw::explicit_discrete: empty pmf");
    double mass = pmf.mass();
    if (std::abs(mass - 1.0) > pmf.tail_bound + 1e-12)
        throw std::invalid_argument("JumpLaw::explicit_discrete: mass does not sum to 1");
    return JumpLaw(Kind::explicit_discrete, 0.0, GcpParams(), std::move(pmf));
}

bool JumpLaw::integer_valued() const {
    if (kind_ == Kind::exponential) return false;
    if (kind_ == Kind::point_mass) return a_ == std::floor(a_);
    return true;
}

double JumpLaw::mean() const {
    switch (kind_) {
        case Kind::point_mass: return a_;
        case Kind::geometric: return 1.0 / a_;
        case Kind::exponential: return 1.0 / a_;
        case Kind::gcp_unit: return gcp_.mean_rate();
        case Kind::explicit_discrete: return pmf_.mean();
    }
    return 0.0;
}

double JumpLaw::variance() const {
    switch (kind_) {
        case Kind::point_mass: return 0.0;
        case Kind::geometric: return (1.0 - a_) / (a_ * a_);
        case Kind::exponential: return 1.0 / (a_ * a_);
        case Kind::gcp_unit: return gcp_.second_moment_rate();
        case Kind::explicit_discrete: {
            double m = pmf_.mean(), s = 0.0;
            for (size_t n = 0; n < pmf_.p.size(); ++n) s += double(n) * double(n) * pmf_.p[n];
            return s - m * m;
        }
    }
    return 0.0;
}

double JumpLaw::pgf(double u) const {
    if (std::abs(u) > 1.0) throw std::domain_error("JumpLaw::pgf: |u| > 1");
    switch (kind_) {
        case Kind::point_mass:
            if (!integer_valued()) throw std::domain_error("JumpLaw::pgf: non-integer point mass");
            return std::pow(u, a_);
        case Kind::geometric: return a_ * u / (1.0 - (1.0 - a_) * u);
        case Kind::exponential: throw std::domain_error("JumpLaw::pgf: continuous law");
        case Kind::gcp_unit: return gcp_pgf(gcp_, u, 1.0);
        case Kind::explicit_discrete: {
            double s = 0.0;
            for (size_t n = 0; n < pmf_.p.size(); ++n) s += pmf_.p[n] * std::pow(u, double(n));
            return s;
        }
    }
    return 0.0;
}

double JumpLaw::convolution_pmf(int m, long n) const {
    if (m < 0) throw std::invalid_argument("JumpLaw::convolution_pmf: m < 0");
    if (!integer_valued()) throw std::domain_error("JumpLaw::convolution_pmf: continuous law");
    if (m == 0) return n == 0 ? 1.0 : 0.0;
    if (n < 0) return 0.0;
    switch (kind_) {
        case Kind::point_mass: return n == m * long(a_) ? 1.0 : 0.0;
        case Kind::geometric:
            if (n < m) return 0.0;
            return binomial(int(n) - 1, m - 1) * std::pow(a_, double(m)) *
                   std::pow(1.0 - a_, double(n - m));
        case Kind::gcp_unit: return gcp_pmf(gcp_, n, double(m));
        case Kind::explicit_discrete: return pmf_convolution_power(pmf_, m).at(n);
        default: return 0.0;
    }
}

double JumpLaw::convolution_cdf(int m, double w) const {
    if (m < 0) throw std::invalid_argument("JumpLaw::convolution_cdf: m < 0");
    if (m == 0) return w >= 0.0 ? 1.0 : 0.0;
    if (kind_ == Kind::exponential)
        return w <= 0.0 ? 0.0 : regularized_gamma_p(double(m), a_ * w);
    if (kind_ == Kind::point_mass) return w >= double(m) * a_ ? 1.0 : 0.0;
    if (w < 0.0) return 0.0;
    double acc = 0.0;
    for (long n = 0; n <= long(std::floor(w)); ++n) acc += convolution_pmf(m, n);
    return acc;
}

long JumpLaw::default_truncation(double tol) const {
    switch (kind_) {
        case Kind::point_mass: return long(a_) + 1;
        case Kind::geometric:
            if (a_ == 1.0) return 2;
            return long(std::ceil(std::log(tol) / std::log1p(-a_))) + 2;
        case Kind::gcp_unit: return gcp_default_truncation(gcp_, 1.0);
        case Kind::explicit_discrete: return long(pmf_.p.size());
        default: throw std::domain_error("JumpLaw::default_truncation: continuous law");
    }
}

PmfVector JumpLaw::pmf_vector(long n_max) const {
    if (!integer_valued()) throw std::domain_error("JumpLaw::pmf_vector: continuous law");
    PmfVector out;
    out.p.assign(size_t(n_max) + 1, 0.0);
    for (long n = 0; n <= n_max; ++n) out.p[size_t(n)] = convolution_pmf(1, n);
    out.tail_bound = std::max(0.0, 1.0 - out.mass());
    return out;
}

double JumpLaw::sample(RngStream& rng) const {
    switch (kind_) {
        case Kind::point_mass: return a_;
        case Kind::geometric: return double(rng.geometric(a_));
        case Kind::exponential: return rng.exponential(a_);
        case Kind::gcp_unit: return double(sample_gcp_value(gcp_, 1.0, rng));
        case Kind::explicit_discrete: {
            double u = rng.u01();
            double acc = 0.0;
            for (size_t n = 0; n < pmf_.p.size(); ++n) {
                acc += pmf_.p[n];
                if (u < acc) return double(n);
            }
            return double(pmf_.p.size() - 1);
        }
    }
    return 0.0;
}

double cgcp_pgf(const GcpParams& outer, const JumpLaw& law, double u, double t) {
    if (std::abs(u) > 1.0) throw std::domain_error("cgcp_pgf: |u| > 1");
    double phi = law.pgf(u);
    double s = 0.0;
    for (size_t j = 0; j < outer.rates.size(); ++j)
        s += outer.rates[j] * (1.0 - std::pow(phi, double(j + 1)));
    return std::exp(-t * s);
}

namespace {
long compound_m_truncation(const IgcpParams& params, double t) {
    auto m = igcp_moments(params, t, t);
    return long(std::ceil(m.mean + 12.0 * std::sqrt(m.variance) + 20.0));
}
}  // namespace

double compound_igcp_cdf(const IgcpParams& params, const JumpLaw& law, double w, double t,
                         long m_max) {
    if (m_max < 0) m_max = compound_m_truncation(params, t);
    double acc = (w >= 0.0) ? igcp_pmf(params, 0, t).value : 0.0;
    for (long m = 1; m <= m_max; ++m) {
        double weight = igcp_pmf(params, m, t).value;
        if (weight == 0.0) continue;
        acc += law.convolution_cdf(int(m), w) * weight;
    }
    return acc;
}

SeriesResult compound_igcp_pmf(const IgcpParams& params, const JumpLaw& law, long n, double t,
                               long m_max) {
    if (!law.integer_valued())
        throw std::domain_error("compound_igcp_pmf: law is not integer-valued");
    if (n < 0) return SeriesResult{0.0, 0, 0.0};
    if (m_max < 0) m_max = compound_m_truncation(params, t);
    double atom = igcp_pmf(params, 0, t).value;
    double acc = (n == 0) ? atom : 0.0;
    double covered = atom;
    long terms = 1;
    for (long m = 1; m <= m_max; ++m) {
        double weight = igcp_pmf(params, m, t).value;
        covered += weight;
        acc += law.convolution_pmf(int(m), n) * weight;
        ++terms;
    }
    return SeriesResult{acc, terms, std::max(0.0, 1.0 - covered) + 1e-13};
}

double compound_igcp_pgf(const IgcpParams& params, const JumpLaw& law, double u, double t) {
    if (std::abs(u) > 1.0) throw std::domain_error("compound_igcp_pgf: |u| > 1");
    double phi = law.pgf(u);
    double theta = 0.0;
    for (size_t j = 0; j < params.outer.rates.size(); ++j)
        theta += params.outer.rates[j] * (1.0 - std::pow(phi, double(j + 1)));
    double s = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
        s += params.inner.rates[j0] * (1.0 - std::exp(-double(j0 + 1) * theta));
    return std::exp(-t * s);
}

Moments compound_igcp_moments(const IgcpParams& params, const JumpLaw& law, double t) {
    double ex = law.mean(), vx = law.variance();
    double a = params.outer.mean_rate();
    double mean = params.s_constant() * t * ex;
    double var = (a * ex) * (a * ex) * params.inner.second_moment_rate() * t +
                 params.inner.mean_rate() * t *
                     (vx * a + ex * ex * params.outer.second_moment_rate());
    return Moments{mean, var};
}

double compound_fdd(const IgcpParams& params, const JumpLaw& law,
                    const std::vector<double>& times, const std::vector<long>& targets,
                    long m_max) {
    if (times.empty() || times.size() != targets.size())
        throw std::invalid_argument("compound_fdd: times/targets mismatch");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("compound_fdd: times must be strictly increasing");
    if (!law.integer_valued()) throw std::domain_error("compound_fdd: law is not integer-valued");
    for (long x : targets)
        if (x < 0) return 0.0;

    long cap = *std::max_element(targets.begin(), targets.end());
    // joint state law restricted to the constraints seen so far
    std::vector<double> a(size_t(cap) + 1, 0.0);
    a[0] = 1.0;
    double prev_t = 0.0;
    for (size_t step = 0; step < times.size(); ++step) {
        double dt = times[step] - prev_t;
        prev_t = times[step];
        // stationary independent increments: the increment over dt is itself
        // compound distributed at elapsed time dt
        std::vector<double> g(size_t(cap) + 1, 0.0);
        for (long w = 0; w <= cap; ++w)
            g[size_t(w)] = compound_igcp_pmf(params, law, w, dt, m_max).value;
        std::vector<double> next(size_t(cap) + 1, 0.0);
        for (long v = 0; v <= std::min(cap, targets[step]); ++v) {
            if (a[size_t(v)] == 0.0) continue;
            for (long w = 0; v + w <= targets[step]; ++w)
                next[size_t(v + w)] += a[size_t(v)] * g[size_t(w)];
        }
        a = std::move(next);
    }
    double total = 0.0;
    for (long v = 0; v <= targets.back(); ++v) total += a[size_t(v)];
    return total;
}

double d_process_pgf(const IgcpParams& params, const JumpLaw& law, double u, double t,
                     double tail_tol) {
    if (std::abs(u) > 1.0) throw std::domain_error("d_process_pgf: |u| > 1");
    if (!law.integer_valued()) throw std::domain_error("d_process_pgf: law is not integer-valued");
    long n_base = law.default_truncation(tail_tol / 10.0) + 40;
    PmfVector alpha = law.pmf_vector(n_base);
    double theta = 0.0;
    for (size_t j = 0; j < params.outer.rates.size(); ++j) {
        PmfVector conv = pmf_convolution_power(alpha, int(j + 1));
        double inner = 0.0;
        for (size_t i = 1; i < conv.p.size(); ++i)
            inner += conv.p[i] * (1.0 - std::pow(u, double(i)));
        inner += std::max(0.0, 1.0 - conv.mass());  // truncated mass, 1 - u^i <= 1 out there
        theta += params.outer.rates[j] * inner;
    }
    double s = 0.0;
    for (size_t j0 = 0; j0 < params.inner.rates.size(); ++j0)
        s += params.inner.rates[j0] * (1.0 - std::exp(-double(j0 + 1) * theta));
    return std::exp(-t * s);
}

double compound_martingale_residual(double path_value, const IgcpParams& params,
                                    const JumpLaw& law, double t) {
    return path_value - params.s_constant() * t * law.mean();
}

double sample_compound_value(const IgcpParams& params, const JumpLaw& law, double t,
                             RngStream& rng) {
    long m = sample_igcp_value(params, t, rng);
    double acc = 0.0;
    for (long i = 0; i < m; ++i) acc += law.sample(rng);
    return acc;
}

}  // namespace igcp
