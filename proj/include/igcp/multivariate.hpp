#pragma once

#include <complex>
#include <vector>

#include "igcp/igcp.hpp"

namespace igcp {

// q component processes sharing one subordinating inner process; the shared
// time change makes the components dependent.
struct MvIgcpParams {
    std::vector<GcpParams> components;  // lambda_{i j_i}
    GcpParams inner;                    // mu_{j0}

    MvIgcpParams(std::vector<GcpParams> comps, GcpParams in);

    int q() const { return int(components.size()); }
    double capital_lambda() const;  // sum over all components of all rates
};

double mv_pgf(const MvIgcpParams& params, const std::vector<double>& u, double t);

// joint pmf as the series over the inner state m with component-product
// weights, truncated with a certified tail
SeriesResult mv_pmf(const MvIgcpParams& params, const std::vector<long>& n, double t,
                    long m_max = -1);

// equivalent closed form through the Bell mixture kernel; cross-checks mv_pmf
SeriesResult mv_pmf_bell(const MvIgcpParams& params, const std::vector<long>& n, double t,
                         long long work_budget = 10000000);

// integrates the joint forward equations on the lattice [0,n_max]^q and
// returns the max abs deviation from mv_pmf
double mv_ode_verify(const MvIgcpParams& params, const std::vector<long>& n_max, double t_end,
                     int grid_points = 4, double abs_tol = 1e-9);

// atomic Levy measure at lattice points n > 0 (componentwise >= 0, not all 0)
double mv_levy_measure(const MvIgcpParams& params, const std::vector<long>& n);

// Cov of components i and l (1-based), both time-changed by the shared inner
// process
double mv_covariance(const MvIgcpParams& params, int i, int l, double t);

// codifference evaluated over complex omega
std::complex<double> mv_codifference(const MvIgcpParams& params, int i, int l,
                                     std::complex<double> omega, double t);

std::vector<long> sample_mv_value(const MvIgcpParams& params, double t, RngStream& rng);

}  // namespace igcp
