#pragma once

#include <vector>

#include "igcp/igcp.hpp"
#include "igcp/mc.hpp"

namespace igcp {

struct StableParams {
    double alpha;  // strictly inside (0, 1)

    explicit StableParams(double a);
};

// The composed process run on an inverse stable clock. R is the coefficient
// of the t^{2 alpha} variance term.
struct TcIgcpParams {
    IgcpParams base;
    StableParams stable;

    TcIgcpParams(IgcpParams b, StableParams s) : base(std::move(b)), stable(s) {}

    double r_constant() const;
};

// one draw of the inverse stable clock at time t, via self-similarity:
// t^alpha S^{-alpha} with S a standard positive stable variate
double sample_inverse_stable(const StableParams& stable, double t, RngStream& rng);

// joint draw at several times from one subordinator path, discretized with
// x-step dx (values are exact up to the dx reading resolution)
std::vector<double> sample_inverse_stable_joint(const StableParams& stable,
                                                const std::vector<double>& times,
                                                RngStream& rng, double dx = 0.05);

// z-th derivative of the one-parameter relaxation function E_alpha at -x,
// equal to z! E^{z+1}_{alpha, alpha z + 1}(-x). The generic series cancels
// catastrophically for large z, so away from the benign regimes this runs a
// quadrature over the completely-monotone spectral representation, whose
// integrand is positive.
double ml_alpha_derivative(double alpha, long z, double x);

// state probabilities of a fractional counting layer (rates mu_j0, index
// alpha): the Mittag-Leffler-weighted partition sum. Used as the oracle
// kernel for the time-changed pmf.
SeriesResult gfcp_pmf(const GcpParams& params, double alpha, long m, double t);

SeriesResult tc_igcp_pgf(const TcIgcpParams& params, double u, double t);

// closed-form pmf: the x-lattice is walked shell by shell; the dropped mass
// is certified from the observed geometric decay of the shell terms
SeriesResult tc_igcp_pmf(const TcIgcpParams& params, long n, double t,
                         long long work_budget = 20000000);

// pmf table sharing the Mittag-Leffler kernel across states
PmfVector tc_igcp_pmf_vector(const TcIgcpParams& params, double t, long n_max,
                             long long work_budget = 80000000);

// independent conditioning route over the fractional inner layer
SeriesResult tc_igcp_pmf_oracle(const TcIgcpParams& params, long n, double t, long m_max = -1);

// max abs residual of the fractional forward system under the L1 Caputo
// discretization, measured on the upper half of a uniform grid (the scheme's
// truncation error near t = 0 does not vanish for these kernels)
double tc_fractional_ode_residual(const TcIgcpParams& params, long n_max,
                                  const std::vector<double>& t_grid);

Moments tc_igcp_moments(const TcIgcpParams& params, double t);

// covariance for fixed s and large t (asymptotic in t)
double tc_covariance_asymptotic(const TcIgcpParams& params, double s, double t);

// -slope of log Corr(s, t) against log t over the grid; equals the index of
// the power-law correlation decay
double lrd_exponent(const TcIgcpParams& params, double s, const std::vector<double>& t_grid);

struct SrdReport {
    double exponent = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool conclusive = false;
    std::vector<double> t_grid;
    std::vector<double> correlations;
};

// Monte Carlo estimate of the correlation decay of width-h increments, with
// common subordinator paths per sample pair
SrdReport srd_increment_diagnostic(const TcIgcpParams& params, double h, double s,
                                   const std::vector<double>& t_grid, const McConfig& config,
                                   double dx = 0.05);

// E[X (X-1) ... (X-r+1)] of the time-changed process; exact nested finite sum
SeriesResult tc_factorial_moment(const TcIgcpParams& params, int r, double t,
                                 long long work_budget = 10000000);

long sample_tc_igcp_value(const TcIgcpParams& params, double t, RngStream& rng);

}  // namespace igcp
