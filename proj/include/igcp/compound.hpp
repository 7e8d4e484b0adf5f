#pragma once

#include <vector>

#include "igcp/igcp.hpp"

namespace igcp {

// Jump-size law for compound processes. Discrete kinds expose pgf and
// convolution pmfs; the exponential law works through its closed-form
// convolution cdf (Erlang).
class JumpLaw {
public:
    enum class Kind { point_mass, geometric, exponential, gcp_unit, explicit_discrete };

    static JumpLaw point_mass(double a);
    static JumpLaw geometric(double p);         // support {1, 2, ...}
    static JumpLaw exponential(double rate);    // rate > 0
    static JumpLaw gcp_unit(GcpParams params);  // the unit-time value of a jump process
    static JumpLaw explicit_discrete(PmfVector pmf);

    Kind kind() const { return kind_; }
    bool is_discrete() const { return kind_ != Kind::exponential; }
    // discrete with support in the non-negative integers
    bool integer_valued() const;

    double mean() const;
    double variance() const;

    // E u^X for discrete laws, |u| <= 1
    double pgf(double u) const;

    // pmf of X_1 + ... + X_m at integer n; m = 0 is the point mass at 0
    double convolution_pmf(int m, long n) const;

    // cdf of X_1 + ... + X_m at w
    double convolution_cdf(int m, double w) const;

    // single-jump pmf over 0..n_max with certified tail (integer-valued laws)
    PmfVector pmf_vector(long n_max) const;
    // truncation point with tail below tol
    long default_truncation(double tol) const;

    double sample(RngStream& rng) const;

    double scalar_param() const { return a_; }
    const GcpParams& jump_gcp() const { return gcp_; }

private:
    JumpLaw(Kind kind, double a, GcpParams gcp, PmfVector pmf)
        : kind_(kind), a_(a), gcp_(std::move(gcp)), pmf_(std::move(pmf)) {}

    Kind kind_;
    double a_ = 0.0;  // point-mass location, geometric p, or exponential rate
    GcpParams gcp_;
    PmfVector pmf_;
};

// pgf of the single-layer compound process sum_{i <= M(t)} X_i
double cgcp_pgf(const GcpParams& outer, const JumpLaw& law, double u, double t);

// distribution function of the compound process driven by the composed
// counting process; adds the zero atom and the m-fold convolution series
double compound_igcp_cdf(const IgcpParams& params, const JumpLaw& law, double w, double t,
                         long m_max = -1);

SeriesResult compound_igcp_pmf(const IgcpParams& params, const JumpLaw& law, long n, double t,
                               long m_max = -1);

double compound_igcp_pgf(const IgcpParams& params, const JumpLaw& law, double u, double t);

Moments compound_igcp_moments(const IgcpParams& params, const JumpLaw& law, double t);

// Pr{Z(t_1) <= x_1, ..., Z(t_d) <= x_d} for integer-valued laws, by dynamic
// programming over the independent stationary increments
double compound_fdd(const IgcpParams& params, const JumpLaw& law,
                    const std::vector<double>& times, const std::vector<long>& targets,
                    long m_max = -1);

// pgf assembled from the convolution-power coefficients of the jump law; an
// algebraically equal but computationally distinct route to compound_igcp_pgf
double d_process_pgf(const IgcpParams& params, const JumpLaw& law, double u, double t,
                     double tail_tol = 1e-12);

// D(t) - S t E[X_1]
double compound_martingale_residual(double path_value, const IgcpParams& params,
                                    const JumpLaw& law, double t);

double sample_compound_value(const IgcpParams& params, const JumpLaw& law, double t,
                             RngStream& rng);

}  // namespace igcp
