#include "igcp/gcp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "igcp/kernels.hpp"

namespace igcp {

GcpParams::GcpParams(std::vector<double> r) : rates(std::move(r)) {
    if (rates.empty()) throw std::invalid_argument("GcpParams: need at least one rate");
    for (double v : rates)
        if (!(v > 0.0)) throw std::invalid_argument("GcpParams: rates must be positive");
}

double GcpParams::total_rate() const {
    double s = 0.0;
    for (double v : rates) s += v;
    return s;
}

double GcpParams::mean_rate() const {
    double s = 0.0;
    for (size_t j = 0; j < rates.size(); ++j) s += double(j + 1) * rates[j];
    return s;
}

double GcpParams::second_moment_rate() const {
    double s = 0.0;
    for (size_t j = 0; j < rates.size(); ++j) s += double(j + 1) * double(j + 1) * rates[j];
    return s;
}

RateSchedule::RateSchedule(std::vector<double> grid_points,
                           std::vector<std::vector<double>> piece_rates)
    : grid(std::move(grid_points)), rates(std::move(piece_rates)) {
    if (grid.size() < 2 || grid.front() != 0.0)
        throw std::invalid_argument("RateSchedule: grid must start at 0 with at least one piece");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("RateSchedule: grid not increasing");
    if (rates.empty()) throw std::invalid_argument("RateSchedule: no rate rows");
    for (const auto& row : rates) {
        if (row.size() + 1 != grid.size())
            throw std::invalid_argument("RateSchedule: rate row does not match grid");
        for (double v : row)
            if (v < 0.0) throw std::invalid_argument("RateSchedule: negative rate");
    }
}

RateSchedule RateSchedule::constant(const GcpParams& params, double horizon) {
    std::vector<std::vector<double>> rows;
    for (double v : params.rates) rows.push_back({v});
    return RateSchedule({0.0, horizon}, rows);
}

double RateSchedule::rate(int j0, double t) const {
    if (j0 < 1 || j0 > k0()) throw std::out_of_range("RateSchedule::rate: bad amplitude");
    if (t < 0.0 || t > horizon()) throw std::domain_error("RateSchedule: t outside grid support");
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    size_t piece = std::min(size_t(it - grid.begin() - 1), grid.size() - 2);
    return rates[size_t(j0) - 1][piece];
}

double RateSchedule::cumulative(int j0, double t) const {
    if (j0 < 1 || j0 > k0()) throw std::out_of_range("RateSchedule::cumulative: bad amplitude");
    if (t < 0.0 || t > horizon() + 1e-12) throw std::domain_error("RateSchedule: t outside grid support");
    double acc = 0.0;
    const auto& row = rates[size_t(j0) - 1];
    for (size_t piece = 0; piece + 1 < grid.size(); ++piece) {
        double lo = grid[piece], hi = grid[piece + 1];
        if (t <= lo) break;
        acc += row[piece] * (std::min(t, hi) - lo);
    }
    return acc;
}

double RateSchedule::cumulative_between(int j0, double v, double t_plus_v) const {
    return cumulative(j0, t_plus_v) - cumulative(j0, v);
}

long GcpPath::value_at(double t) const {
    long v = 0;
    for (size_t i = 0; i < event_times.size() && event_times[i] <= t; ++i) v += jump_sizes[i];
    return v;
}

long GcpPath::final_value() const {
    long v = 0;
    for (long s : jump_sizes) v += s;
    return v;
}

double GcpPath::integral_to(double t) const {
    double acc = 0.0;
    double prev = 0.0;
    long v = 0;
    for (size_t i = 0; i < event_times.size() && event_times[i] <= t; ++i) {
        acc += double(v) * (event_times[i] - prev);
        prev = event_times[i];
        v += jump_sizes[i];
    }
    acc += double(v) * (t - prev);
    return acc;
}

double GcpPath::first_passage(long n) const {
    long v = 0;
    for (size_t i = 0; i < event_times.size(); ++i) {
        v += jump_sizes[i];
        if (v == n) return event_times[i];
        if (v > n) break;
    }
    return std::nan("");
}

double gcp_pmf(const GcpParams& params, long n, double t) {
    if (n < 0) return 0.0;
    if (t < 0.0) throw std::domain_error("gcp_pmf: t < 0");
    if (t == 0.0) return n == 0 ? 1.0 : 0.0;
    const int k = params.k();
    const double lambda = params.total_rate();
    double sum = 0.0;
    for_each_weighted_partition(k, int(n), [&](const std::vector<int>& x) {
        double log_term = -lambda * t;
        for (int j = 0; j < k; ++j) {
            if (x[size_t(j)] == 0) continue;
            log_term += x[size_t(j)] * std::log(params.rates[size_t(j)] * t) -
                        log_factorial(x[size_t(j)]);
        }
        sum += std::exp(log_term);
    });
    return sum;
}

PmfVector gcp_pmf_vector(const GcpParams& params, double t, long n_max) {
    if (n_max < 0) throw std::invalid_argument("gcp_pmf_vector: n_max < 0");
    PmfVector out;
    out.p.assign(size_t(n_max) + 1, 0.0);
    if (t == 0.0) {
        out.p[0] = 1.0;
        return out;
    }
    const int k = params.k();
    out.p[0] = std::exp(-params.total_rate() * t);
    for (long n = 1; n <= n_max; ++n) {
        double s = 0.0;
        for (int j = 1; j <= std::min<long>(n, k); ++j)
            s += double(j) * params.rates[size_t(j) - 1] * out.p[size_t(n - j)];
        out.p[size_t(n)] = t / double(n) * s;
    }
    out.tail_bound = std::max(0.0, 1.0 - out.mass());
    return out;
}

long gcp_default_truncation(const GcpParams& params, double t) {
    Moments m = gcp_moments(params, t);
    return long(std::ceil(m.mean + 12.0 * std::sqrt(m.variance) + 20.0));
}

PmfVector gcp_pmf_vector(const GcpParams& params, double t) {
    return gcp_pmf_vector(params, t, gcp_default_truncation(params, t));
}

double gcp_pgf(const GcpParams& params, double u, double t) {
    if (std::abs(u) > 1.0) throw std::domain_error("gcp_pgf: |u| > 1");
    double s = 0.0;
    for (size_t j = 0; j < params.rates.size(); ++j)
        s += params.rates[j] * (1.0 - std::pow(u, double(j + 1)));
    return std::exp(-t * s);
}

double gcp_mgf(const GcpParams& params, double u, double t) {
    double s = 0.0;
    for (size_t j = 0; j < params.rates.size(); ++j)
        s += params.rates[j] * (1.0 - std::exp(u * double(j + 1)));
    return std::exp(-t * s);
}

Moments gcp_moments(const GcpParams& params, double t) {
    if (t < 0.0) throw std::domain_error("gcp_moments: t < 0");
    return Moments{params.mean_rate() * t, params.second_moment_rate() * t};
}

long sample_gcp_value(const GcpParams& params, double t, RngStream& rng) {
    long v = 0;
    for (size_t j = 0; j < params.rates.size(); ++j)
        v += long(j + 1) * rng.poisson(params.rates[j] * t);
    return v;
}

GcpPath sample_gcp_path(const GcpParams& params, double horizon, RngStream& rng) {
    if (horizon < 0.0) throw std::invalid_argument("sample_gcp_path: horizon < 0");
    GcpPath path;
    path.horizon = horizon;
    if (horizon == 0.0) return path;
    const double lambda = params.total_rate();
    double t = rng.exponential(lambda);
    while (t <= horizon) {
        // mark the event with amplitude j w.p. lambda_j / lambda
        double u = rng.u01() * lambda;
        long j = 1;
        double acc = params.rates[0];
        while (u > acc && size_t(j) < params.rates.size()) {
            acc += params.rates[size_t(j)];
            ++j;
        }
        path.event_times.push_back(t);
        path.jump_sizes.push_back(j);
        t += rng.exponential(lambda);
    }
    return path;
}

long sample_nh_gcp_value(const RateSchedule& schedule, double t, RngStream& rng) {
    long v = 0;
    for (int j0 = 1; j0 <= schedule.k0(); ++j0)
        v += long(j0) * rng.poisson(schedule.cumulative(j0, t));
    return v;
}

}  // namespace igcp
