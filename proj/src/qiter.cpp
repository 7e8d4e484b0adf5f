#include "igcp/qiter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace igcp {

QIterParams::QIterParams(GcpParams out, std::vector<GcpParams> lys)
    : outer(std::move(out)), layers(std::move(lys)) {
    if (layers.empty()) throw std::invalid_argument("QIterParams: need q >= 1 layers");
    if (outer.rates.empty()) throw std::invalid_argument("QIterParams: empty outer layer");
    for (const auto& l : layers)
        if (l.rates.empty()) throw std::invalid_argument("QIterParams: empty layer");
}

namespace {

// mean/variance of layer i composed with everything above it at time t,
// i = q-1 (physical time) down to 0
std::vector<Moments> composed_layer_moments(const QIterParams& params, double t) {
    const int q = params.q();
    std::vector<Moments> m(static_cast<size_t>(q));
    const GcpParams& top = params.layers[size_t(q) - 1];
    m[size_t(q) - 1] = Moments{top.mean_rate() * t, top.second_moment_rate() * t};
    for (int i = q - 2; i >= 0; --i) {
        const GcpParams& layer = params.layers[size_t(i)];
        double b = layer.mean_rate(), c = layer.second_moment_rate();
        const Moments& up = m[size_t(i) + 1];
        m[size_t(i)] = Moments{b * up.mean, c * up.mean + b * b * up.variance};
    }
    return m;
}

long support_cut(const Moments& m) {
    return long(std::ceil(m.mean + 12.0 * std::sqrt(m.variance) + 30.0));
}

}  // namespace

SeriesResult qiter_pmf(const QIterParams& params, long n, double t, long long work_budget) {
    if (n < 0) return SeriesResult{0.0, 0, 0.0};
    if (t < 0.0) throw std::domain_error("qiter_pmf: t < 0");
    if (t == 0.0) return SeriesResult{n == 0 ? 1.0 : 0.0, 0, 0.0};
    const int q = params.q();

    // support cut for the argument fed into each level
    auto moments = composed_layer_moments(params, t);
    std::vector<long> cut(static_cast<size_t>(q));
    for (int i = 0; i < q; ++i) cut[size_t(i)] = support_cut(moments[size_t(i)]);
    long long work = 0;
    for (int i = 0; i < q; ++i)
        work += (i + 1 < q) ? cut[size_t(i)] * cut[size_t(i) + 1] : cut[size_t(i)];
    if (work * params.outer.k() > work_budget)
        throw budget_error("qiter_pmf: level supports exceed work budget", 0.0);

    double dropped = 0.0;
    // a[s] = Pr{outer(layer_1(...(s)...)) = n} with s the integer argument of
    // the deepest remaining layer
    std::vector<double> a(size_t(cut[0]) + 1);
    for (long s = 0; s <= cut[0]; ++s)
        a[size_t(s)] = (s == 0) ? (n == 0 ? 1.0 : 0.0)
                                : gcp_pmf_vector(params.outer, double(s), n).at(n);
    for (int i = 0; i + 1 < q; ++i) {
        std::vector<double> next(size_t(cut[size_t(i) + 1]) + 1, 0.0);
        double worst_tail = 0.0;
        for (long sp = 0; sp <= cut[size_t(i) + 1]; ++sp) {
            PmfVector level = (sp == 0) ? PmfVector::point_mass_at_zero()
                                        : gcp_pmf_vector(params.layers[size_t(i)], double(sp),
                                                         cut[size_t(i)]);
            double acc = 0.0;
            for (long s = 0; s <= std::min<long>(cut[size_t(i)], level.max_state()); ++s)
                acc += a[size_t(s)] * level.at(s);
            next[size_t(sp)] = acc;
            worst_tail = std::max(worst_tail, level.tail_bound);
        }
        dropped += worst_tail;
        a = std::move(next);
    }
    PmfVector last = gcp_pmf_vector(params.layers[size_t(q) - 1], t, cut[size_t(q) - 1]);
    double value = 0.0;
    for (long s = 0; s <= cut[size_t(q) - 1]; ++s) value += a[size_t(s)] * last.at(s);
    dropped += last.tail_bound;
    return SeriesResult{value, cut[size_t(q) - 1] + 1, dropped + 1e-13};
}

double qiter_pgf(const QIterParams& params, double u, double t) {
    if (std::abs(u) > 1.0) throw std::domain_error("qiter_pgf: |u| > 1");
    double theta = 0.0;
    for (size_t j = 0; j < params.outer.rates.size(); ++j)
        theta += params.outer.rates[j] * (1.0 - std::pow(u, double(j + 1)));
    for (int i = 0; i < params.q(); ++i) {
        const GcpParams& layer = params.layers[size_t(i)];
        double next = 0.0;
        for (size_t j = 0; j < layer.rates.size(); ++j)
            next += layer.rates[j] * (1.0 - std::exp(-double(j + 1) * theta));
        theta = next;
    }
    return std::exp(-t * theta);
}

Moments qiter_moments(const QIterParams& params, double t) {
    if (t < 0.0) throw std::domain_error("qiter_moments: t < 0");
    const int q = params.q();
    double a = params.outer.mean_rate();
    double a2 = params.outer.second_moment_rate();
    std::vector<double> b(static_cast<size_t>(q)), c(static_cast<size_t>(q));
    for (int i = 0; i < q; ++i) {
        b[size_t(i)] = params.layers[size_t(i)].mean_rate();
        c[size_t(i)] = params.layers[size_t(i)].second_moment_rate();
    }
    double prod_b = 1.0;
    for (int i = 0; i < q; ++i) prod_b *= b[size_t(i)];
    double mean = a * prod_b * t;

    // telescoped variance of the layer composition, then one more level
    double var_layers = 0.0;
    for (int r = 0; r < q; ++r) {
        double term = c[size_t(r)];
        for (int l = 0; l < r; ++l) term *= b[size_t(l)] * b[size_t(l)];
        for (int i = r + 1; i < q; ++i) term *= b[size_t(i)];
        var_layers += term;
    }
    double variance = a2 * prod_b * t + a * a * var_layers * t;
    if (t > 0.0 && !(variance > mean))
        throw std::logic_error("qiter_moments: overdispersion violated");
    return Moments{mean, variance};
}

long sample_qiter_value(const QIterParams& params, double t, RngStream& rng) {
    long v = sample_gcp_value(params.layers[size_t(params.q()) - 1], t, rng);
    for (int i = params.q() - 2; i >= 0; --i) {
        if (v == 0) return 0;
        v = sample_gcp_value(params.layers[size_t(i)], double(v), rng);
    }
    return v == 0 ? 0 : sample_gcp_value(params.outer, double(v), rng);
}

}  // namespace igcp
