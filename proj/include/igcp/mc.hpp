#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "igcp/pmf.hpp"
#include "igcp/rng.hpp"

namespace igcp {

struct McConfig {
    long long samples = 100000;
    uint64_t master_seed = 1;
    int workers = 0;  // 0 = hardware concurrency
    std::vector<double> checkpoints;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long long n = 0;
    uint64_t master_seed = 0;
    uint64_t stream_base = 0;
};

// Runs `sampler` once per sample on its own counter-based stream
// (stream id = stream_base + sample index) and aggregates block sums with a
// fixed-order pairwise tree, so the result is bit-identical for any worker
// count. K is the number of accumulated components per sample.
template <size_t K>
std::array<double, K> run_blocked(
    const std::function<std::array<double, K>(RngStream&)>& sampler,
    long long samples, uint64_t master_seed, int workers, uint64_t stream_base = 0);

// Mean and standard error of a scalar sampler (n >= 2 required for the SE).
McEstimate run_mc(const std::function<double(RngStream&)>& sampler, const McConfig& config,
                  uint64_t stream_base = 0);

struct GofResult {
    double statistic = 0.0;
    double p_value = 0.0;
    int dof = 0;
};

// Pearson chi-square against a truncated pmf. Adjacent cells are pooled until
// each bin has expected count >= min_bin; the final bin absorbs the tail.
GofResult chi_square_gof(const std::vector<long long>& observed_counts,
                         const PmfVector& expected_pmf, double min_bin = 5.0);

// One-sample Kolmogorov-Smirnov test with the asymptotic p-value.
GofResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace igcp
