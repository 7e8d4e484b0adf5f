#pragma once

#include <string>
#include <vector>

namespace igcp {

// Probability mass over states 0..N, truncated; the mass not represented is
// at most tail_bound.
struct PmfVector {
    std::vector<double> p;
    double tail_bound = 0.0;

    static PmfVector point_mass_at_zero() { return PmfVector{{1.0}, 0.0}; }

    double at(long n) const {
        return (n >= 0 && size_t(n) < p.size()) ? p[size_t(n)] : 0.0;
    }
    long max_state() const { return long(p.size()) - 1; }

    double mass() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }

    double mean() const {
        double s = 0.0;
        for (size_t n = 0; n < p.size(); ++n) s += double(n) * p[n];
        return s;
    }

    // cumulative probability of states <= n
    double cdf(long n) const {
        double s = 0.0;
        for (long i = 0; i <= n && size_t(i) < p.size(); ++i) s += p[size_t(i)];
        return s;
    }

    // CSV rows "n,probability"
    std::string to_csv() const;
    // JSON array with metadata: {"params": <caller-supplied>, "t": ..., "tail_bound": ..., "pmf": [...]}
    std::string to_json(const std::string& params_json, double t) const;
};

// single discrete convolution
PmfVector pmf_convolve(const PmfVector& a, const PmfVector& b);

// m-fold convolution power; m = 0 is the point mass at 0.
// Tail bounds propagate additively.
PmfVector pmf_convolution_power(const PmfVector& pmf, int m);

}  // namespace igcp
