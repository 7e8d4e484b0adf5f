#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace igcp {

// Philox4x32-10 counter-based generator. A stream is addressed by
// (master_seed, stream_id); distinct ids give statistically independent
// streams with no coordination, which is what makes parallel Monte Carlo
// reproducible across worker counts.
class RngStream {
public:
    RngStream(uint64_t master_seed, uint64_t stream_id)
        : key0_(uint32_t(master_seed)), key1_(uint32_t(master_seed >> 32)),
          stream_lo_(uint32_t(stream_id)), stream_hi_(uint32_t(stream_id >> 32)) {}

    uint64_t master_seed() const { return uint64_t(key1_) << 32 | key0_; }
    uint64_t stream_id() const { return uint64_t(stream_hi_) << 32 | stream_lo_; }

    uint64_t next_u64() {
        if (have_ == 0) refill();
        --have_;
        uint64_t lo = out_[2 * have_];
        uint64_t hi = out_[2 * have_ + 1];
        return hi << 32 | lo;
    }

    // uniform on [0, 1) with 53 random bits
    double u01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1]
    double u01_pos() { return 1.0 - u01(); }

    double exponential(double rate) { return -std::log(u01_pos()) / rate; }

    // geometric on {1, 2, ...} with success probability p
    long geometric(double p) {
        if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("geometric: p not in (0,1]");
        if (p == 1.0) return 1;
        return long(std::floor(std::log(u01_pos()) / std::log1p(-p))) + 1;
    }

    long poisson(double mean);

    // standard positive alpha-stable variate, E exp(-s S) = exp(-s^alpha),
    // by the Kanter exponential-uniform transformation
    double positive_stable(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("positive_stable: alpha not in (0,1)");
        double u = u01_pos();
        if (u >= 1.0) u = 1.0 - 0x1.0p-53;
        double w = exponential(1.0);
        double theta = M_PI * u;
        double log_a = std::log(std::sin((1.0 - alpha) * theta)) +
                       alpha / (1.0 - alpha) * std::log(std::sin(alpha * theta)) -
                       1.0 / (1.0 - alpha) * std::log(std::sin(theta));
        return std::exp((1.0 - alpha) / alpha * (log_a - std::log(w)));
    }

private:
    void refill() {
        uint32_t x0 = uint32_t(counter_), x1 = uint32_t(counter_ >> 32);
        uint32_t x2 = stream_lo_, x3 = stream_hi_;
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            uint64_t p0 = uint64_t(0xD2511F53u) * x0;
            uint64_t p1 = uint64_t(0xCD9E8D57u) * x2;
            uint32_t y0 = uint32_t(p1 >> 32) ^ x1 ^ k0;
            uint32_t y1 = uint32_t(p1);
            uint32_t y2 = uint32_t(p0 >> 32) ^ x3 ^ k1;
            uint32_t y3 = uint32_t(p0);
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out_[0] = x0; out_[1] = x1; out_[2] = x2; out_[3] = x3;
        ++counter_;
        have_ = 2;
    }

    uint32_t key0_, key1_;
    uint32_t stream_lo_, stream_hi_;
    uint64_t counter_ = 0;
    uint32_t out_[4] = {0, 0, 0, 0};
    int have_ = 0;
};

}  // namespace igcp
