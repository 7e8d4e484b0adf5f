#include "igcp/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "igcp/kernels.hpp"

namespace igcp {

namespace {
constexpr long long kBlock = 4096;
}

template <size_t K>
std::array<double, K> run_blocked(
    const std::function<std::array<double, K>(RngStream&)>& sampler,
    long long samples, uint64_t master_seed, int workers, uint64_t stream_base) {
    if (samples <= 0) throw std::invalid_argument("run_blocked: samples <= 0");
    int nw = workers > 0 ? workers : int(std::max(1u, std::thread::hardware_concurrency()));
    long long n_blocks = (samples + kBlock - 1) / kBlock;
    std::vector<std::array<double, K>> block_sums(static_cast<size_t>(n_blocks));

    std::atomic<long long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    uint64_t failed_stream = 0;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            long long b = next.fetch_add(1);
            if (b >= n_blocks) return;
            long long lo = b * kBlock;
            long long hi = std::min(samples, lo + kBlock);
            std::array<double, K> acc{};
            for (long long i = lo; i < hi; ++i) {
                uint64_t stream_id = stream_base + uint64_t(i);
                RngStream stream(master_seed, stream_id);
                try {
                    auto v = sampler(stream);
                    for (size_t c = 0; c < K; ++c) acc[c] += v[c];
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!failed.exchange(true)) {
                        first_error = std::current_exception();
                        failed_stream = stream_id;
                    }
                    return;
                }
            }
            block_sums[size_t(b)] = acc;
        }
    };
    if (nw == 1 || n_blocks == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(size_t(nw));
        for (int w = 0; w < nw; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) {
        try {
            std::rethrow_exception(first_error);
        } catch (const std::exception& e) {
            throw std::runtime_error("run_blocked: sampler failed on stream " +
                                     std::to_string(failed_stream) + ": " + e.what());
        }
    }

    // fixed-order pairwise tree reduction, independent of worker count
    size_t len = block_sums.size();
    while (len > 1) {
        size_t half = (len + 1) / 2;
        for (size_t i = 0; i + half < len; ++i)
            for (size_t c = 0; c < K; ++c) block_sums[i][c] += block_sums[i + half][c];
        len = half;
    }
    return block_sums[0];
}

template std::array<double, 1> run_blocked<1>(
    const std::function<std::array<double, 1>(RngStream&)>&, long long, uint64_t, int, uint64_t);
template std::array<double, 2> run_blocked<2>(
    const std::function<std::array<double, 2>(RngStream&)>&, long long, uint64_t, int, uint64_t);
template std::array<double, 5> run_blocked<5>(
    const std::function<std::array<double, 5>(RngStream&)>&, long long, uint64_t, int, uint64_t);

McEstimate run_mc(const std::function<double(RngStream&)>& sampler, const McConfig& config,
                  uint64_t stream_base) {
    if (config.samples < 2) throw std::invalid_argument("run_mc: need at least 2 samples");
    auto sums = run_blocked<2>(
        [&](RngStream& s) {
            double v = sampler(s);
            return std::array<double, 2>{v, v * v};
        },
        config.samples, config.master_seed, config.workers, stream_base);
    double n = double(config.samples);
    double mean = sums[0] / n;
    double var = std::max(0.0, (sums[1] / n - mean * mean) * n / (n - 1.0));
    McEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(var / n);
    est.n = config.samples;
    est.master_seed = config.master_seed;
    est.stream_base = stream_base;
    return est;
}

GofResult chi_square_gof(const std::vector<long long>& observed_counts,
                         const PmfVector& expected_pmf, double min_bin) {
    long long n = 0;
    for (long long c : observed_counts) n += c;
    if (n <= 0) throw std::invalid_argument("chi_square_gof: empty sample");

    size_t cells = std::max(observed_counts.size(), expected_pmf.p.size());
    // pool cells left to right until each bin expects >= min_bin counts;
    // the final bin also absorbs the tail mass beyond the truncation
    std::vector<double> exp_bins;
    std::vector<long long> obs_bins;
    double e_acc = 0.0;
    long long o_acc = 0;
    for (size_t i = 0; i < cells; ++i) {
        double e = (i < expected_pmf.p.size() ? expected_pmf.p[i] : 0.0) * double(n);
        long long o = i < observed_counts.size() ? observed_counts[i] : 0;
        e_acc += e;
        o_acc += o;
        if (e_acc >= min_bin) {
            exp_bins.push_back(e_acc);
            obs_bins.push_back(o_acc);
            e_acc = 0.0;
            o_acc = 0;
        }
    }
    double tail = std::max(0.0, 1.0 - expected_pmf.mass()) * double(n);
    e_acc += tail;
    if (!exp_bins.empty() && e_acc < min_bin) {
        exp_bins.back() += e_acc;
        obs_bins.back() += o_acc;
    } else {
        exp_bins.push_back(e_acc);
        obs_bins.push_back(o_acc);
    }
    if (exp_bins.size() < 2)
        throw std::runtime_error("chi_square_gof: degenerate binning, all mass in one bin");

    double stat = 0.0;
    for (size_t b = 0; b < exp_bins.size(); ++b) {
        double d = double(obs_bins[b]) - exp_bins[b];
        stat += d * d / exp_bins[b];
    }
    int dof = int(exp_bins.size()) - 1;
    GofResult r;
    r.statistic = stat;
    r.dof = dof;
    r.p_value = regularized_gamma_q(0.5 * double(dof), 0.5 * stat);
    return r;
}

namespace {
// asymptotic Kolmogorov survival function with Stephens' small-sample scaling
double kolmogorov_p(double d, double n) {
    double z = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * ((k & 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * z * z);
        s += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::min(1.0, std::max(0.0, s));
}
}  // namespace

GofResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_test: empty sample set");
    std::sort(samples.begin(), samples.end());
    double n = double(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::max(double(i + 1) / n - f, f - double(i) / n));
    }
    GofResult r;
    r.statistic = d;
    r.dof = 0;
    r.p_value = kolmogorov_p(d, n);
    return r;
}

}  // namespace igcp
