#pragma once

#include <vector>

#include "igcp/gcp.hpp"
#include "igcp/kernels.hpp"
#include "igcp/pmf.hpp"
#include "igcp/rng.hpp"

namespace igcp {

// Composition of two independent counting processes: the outer process
// evaluated at the (integer) value of the inner one. S and T are the linear
// mean and variance slopes: E = S t, Var = T t.
struct IgcpParams {
    GcpParams outer;  // lambda_1..lambda_k
    GcpParams inner;  // mu_1..mu_k0

    IgcpParams(GcpParams out, GcpParams in);

    double s_constant() const;  // S = (sum j lambda_j)(sum j0 mu_j0)
    double t_constant() const;  // T = (sum j lambda_j)^2 sum j0^2 mu_j0 + (sum j^2 lambda_j)(sum j0 mu_j0)
};

// Shared evaluator for every Bell-polynomial pmf in this family: the state
// probability of the outer process subordinated to independent Poisson
// components with amplitude j0 and mass inner_masses[j0-1] (mu_j0 t for the
// homogeneous process, rho_j0(t) for the non-homogeneous one, rho_j0(v, t+v)
// for increments). The composition sum over (r_1..r_k0) is folded as a
// product of exponential generating functions, so the cost is
// |Omega(k, n)| * n * k0 rather than the nominal partition x composition count.
SeriesResult bell_form_pmf(const GcpParams& outer, const std::vector<double>& inner_masses,
                           long n, long long work_budget = 10000000);

// The z-indexed mixture kernel of the Bell forms:
//   w(z) = exp(-sum_j0 mass_j0 (1 - e^{-j0 L})) * z! * (c_1 * ... * c_k0)(z),
//   c_j0(r) = j0^r B_r(mass_j0 e^{-j0 L}) / r!,
// where L is the total outer rate. Multiplying w(z_total) by the partition
// coefficients of the outer layer(s) yields the state probabilities.
std::vector<double> bell_mixture_weights(const std::vector<double>& inner_masses,
                                         double outer_total_rate, long z_max);

// Pr{M(M0(t)) = n} via the Bell-polynomial closed form
SeriesResult igcp_pmf(const IgcpParams& params, long n, double t,
                      long long work_budget = 10000000);

// independent oracle: direct conditioning  sum_s Pr{M(s)=n} Pr{M0(t)=s}
SeriesResult igcp_pmf_series_oracle(const IgcpParams& params, long n, double t,
                                    long s_max = -1);

// pmf table over 0..(mean + 12 stddev + 20) with certified tail
PmfVector igcp_pmf_vector(const IgcpParams& params, double t);
PmfVector igcp_pmf_vector(const IgcpParams& params, double t, long n_max);

double igcp_pgf(const IgcpParams& params, double u, double t);
double igcp_mgf(const IgcpParams& params, double u, double t);

// generator coefficients: m = 0 gives the (negative) total outflow rate,
// m >= 1 the rate of jumps of size m
double igcp_transition_rate(const IgcpParams& params, long m);

// atomic Levy measure at n >= 1; identical to the m = n transition rate
double igcp_levy_measure(const IgcpParams& params, long n);

struct IgcpMoments {
    double mean = 0.0;       // S t
    double variance = 0.0;   // T t
    double covariance = 0.0; // Cov(M^(s), M^(t)) = T s for s <= t
};

IgcpMoments igcp_moments(const IgcpParams& params, double s, double t);

// integrates the forward equations from the point mass at zero and returns
// the max abs deviation from the analytic pmf over a uniform time grid
double igcp_ode_verify(const IgcpParams& params, long n_max, double t_end,
                       int grid_points = 8, double abs_tol = 1e-9);

// density (in s) of the first time the process sits exactly at state n
double first_passage_density(const IgcpParams& params, long n, double s, long r_max = -1);

// Pr{T_1 < infinity}: the probability state 1 is ever visited
double first_passage_prob_finite(const IgcpParams& params);

// value - S t; zero-mean along any checkpoint when value ~ process at t
double martingale_residual(long path_value, const IgcpParams& params, double t);

// exp(u value - sum_j0 mu_j0 t (exp(-j0 sum_j lambda_j (1 - e^{u j})) - 1));
// unit mean when value ~ process at t
double exponential_martingale(long path_value, const IgcpParams& params, double u, double t);

struct FractionalIntegralMoments {
    double mean = 0.0;              // S t^{alpha+1} / Gamma(alpha+2)
    double variance = 0.0;          // T t^{2 alpha+1} / ((2 alpha+1) Gamma(alpha+1)^2)
    double cov_with_process = 0.0;  // T t^2 / 2, defined for alpha = 1 (NaN otherwise)
};

FractionalIntegralMoments fractional_integral_moments(const IgcpParams& params, double alpha,
                                                      double t);

// E[ integral | process value at t equals n ]
SeriesResult fractional_integral_conditional_mean(const IgcpParams& params, double alpha,
                                                  double t, long n,
                                                  long long work_budget = 10000000);

// ---- non-homogeneous inner layer ----

SeriesResult nh_igcp_pmf(const GcpParams& outer, const RateSchedule& schedule, long n,
                         double t, long long work_budget = 10000000);

Moments nh_igcp_moments(const GcpParams& outer, const RateSchedule& schedule, double t);

// Pr{tau_n <= t} = 1 - sum_{m<n} pmf(m, t)
double nh_first_passage_cdf(const GcpParams& outer, const RateSchedule& schedule, long n,
                            double t);

// increment over (v, t+v]
SeriesResult nh_increment_pmf(const GcpParams& outer, const RateSchedule& schedule, long n,
                              double t, double v, long long work_budget = 10000000);

// ---- sampling ----

long sample_igcp_value(const IgcpParams& params, double t, RngStream& rng);
GcpPath sample_igcp_path(const IgcpParams& params, double horizon, RngStream& rng);
long sample_nh_igcp_value(const GcpParams& outer, const RateSchedule& schedule, double t,
                          RngStream& rng);
long sample_nh_increment_value(const GcpParams& outer, const RateSchedule& schedule, double t,
                               double v, RngStream& rng);

}  // namespace igcp
