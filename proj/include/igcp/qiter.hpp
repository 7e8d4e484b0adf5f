#pragma once

#include <vector>

#include "igcp/igcp.hpp"

namespace igcp {

// Nested composition: the outer process fed by layer 1, fed by layer 2, ...,
// with the last layer running on physical time.
struct QIterParams {
    GcpParams outer;
    std::vector<GcpParams> layers;  // layers[0] directly under the outer process

    QIterParams(GcpParams out, std::vector<GcpParams> lys);

    int q() const { return int(layers.size()); }
};

// state probability by peeling the composition one conditioning layer at a
// time, each level truncated at its mean + 12 stddev support
SeriesResult qiter_pmf(const QIterParams& params, long n, double t,
                       long long work_budget = 10000000);

// nested-exponential closed form, folded inside out
double qiter_pgf(const QIterParams& params, double u, double t);

Moments qiter_moments(const QIterParams& params, double t);

long sample_qiter_value(const QIterParams& params, double t, RngStream& rng);

}  // namespace igcp
