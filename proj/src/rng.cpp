#include "igcp/rng.hpp"

namespace igcp {

namespace {

long poisson_knuth(RngStream& g, double mean) {
    double limit = std::exp(-mean);
    long k = 0;
    double prod = g.u01_pos();
    while (prod > limit) {
        ++k;
        prod *= g.u01_pos();
    }
    return k;
}

// Hoermann's PTRS transformed-rejection sampler, exact for mean >= 10
long poisson_ptrs(RngStream& g, double mean) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = g.u01() - 0.5;
        double v = g.u01_pos();
        double us = 0.5 - std::abs(u);
        long k = long(std::floor((2.0 * a / us + b) * u + mean + 0.43));
        if (us >= 0.07 && v <= v_r) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            double(k) * log_mean - mean - std::lgamma(double(k) + 1.0))
            return k;
    }
}

}  // namespace

long RngStream::poisson(double mean) {
    if (mean < 0.0) throw std::domain_error("poisson: negative mean");
    if (mean == 0.0) return 0;
    return (mean < 10.0) ? poisson_knuth(*this, mean) : poisson_ptrs(*this, mean);
}

}  // namespace igcp
