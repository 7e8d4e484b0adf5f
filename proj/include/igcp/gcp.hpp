#pragma once

#include <vector>

#include "igcp/pmf.hpp"
#include "igcp/rng.hpp"

namespace igcp {

// A generalized counting process: simultaneous jumps of amplitude j = 1..k at
// rate rates[j-1]. Equivalently a weighted sum of k independent Poisson
// processes, amplitude j carrying rate lambda_j.
struct GcpParams {
    std::vector<double> rates;  // lambda_1..lambda_k, all > 0

    GcpParams() = default;
    explicit GcpParams(std::vector<double> r);

    int k() const { return int(rates.size()); }
    double total_rate() const;       // lambda = sum lambda_j
    double mean_rate() const;        // sum j lambda_j
    double second_moment_rate() const;  // sum j^2 lambda_j
};

// Piecewise-constant time-dependent rates mu_{j0}(t) on a finite grid.
// grid[0] = 0 < grid[1] < ... < grid[G]; rates[j0][piece] applies on
// [grid[piece], grid[piece+1]).
struct RateSchedule {
    std::vector<double> grid;
    std::vector<std::vector<double>> rates;  // [k0][pieces]

    RateSchedule() = default;
    RateSchedule(std::vector<double> grid_points, std::vector<std::vector<double>> piece_rates);

    static RateSchedule constant(const GcpParams& params, double horizon);

    int k0() const { return int(rates.size()); }
    double horizon() const { return grid.back(); }
    double rate(int j0, double t) const;        // mu_{j0}(t)
    double cumulative(int j0, double t) const;  // rho_{j0}(t) = int_0^t mu_{j0}
    // rho_{j0}(v, t+v) = rho_{j0}(t+v) - rho_{j0}(v)
    double cumulative_between(int j0, double v, double t_plus_v) const;
};

// Right-continuous non-decreasing step path on [0, horizon].
struct GcpPath {
    std::vector<double> event_times;  // strictly increasing, <= horizon
    std::vector<long> jump_sizes;     // positive
    double horizon = 0.0;

    long value_at(double t) const;
    long final_value() const;
    // int_0^t path(s) ds, exact for the step function
    double integral_to(double t) const;
    // first time the path value equals n; NaN when n is skipped or not reached
    double first_passage(long n) const;
};

// Pr{M(t) = n} by the defining sum over weighted partitions
double gcp_pmf(const GcpParams& params, long n, double t);

// pmf of states 0..n_max by the one-pass recursion
//   p(n) = (t/n) sum_{j<=min(n,k)} j lambda_j p(n-j),  p(0) = e^{-lambda t};
// agrees with gcp_pmf and is O(k n) for the whole vector
PmfVector gcp_pmf_vector(const GcpParams& params, double t, long n_max);

// truncation point mean + 12 stddev + 20 used for certified-tail vectors
long gcp_default_truncation(const GcpParams& params, double t);
PmfVector gcp_pmf_vector(const GcpParams& params, double t);

// E u^{M(t)} = exp(-t sum_j lambda_j (1 - u^j)), |u| <= 1
double gcp_pgf(const GcpParams& params, double u, double t);

// E e^{u M(t)}, u real
double gcp_mgf(const GcpParams& params, double u, double t);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

Moments gcp_moments(const GcpParams& params, double t);

// one draw of M(t): sum of j * Poisson(lambda_j t)
long sample_gcp_value(const GcpParams& params, double t, RngStream& rng);

GcpPath sample_gcp_path(const GcpParams& params, double horizon, RngStream& rng);

// non-homogeneous GCP at time t: sum of j0 * Poisson(rho_{j0}(t))
long sample_nh_gcp_value(const RateSchedule& schedule, double t, RngStream& rng);

}  // namespace igcp
