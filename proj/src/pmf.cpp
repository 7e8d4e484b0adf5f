#include "igcp/pmf.hpp"

#include <cstdio>
#include <stdexcept>

namespace igcp {

namespace {
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string PmfVector::to_csv() const {
    std::string out = "n,probability\n";
    for (size_t n = 0; n < p.size(); ++n) {
        out += std::to_string(n);
        out += ',';
        out += fmt17(p[n]);
        out += '\n';
    }
    return out;
}

std::string PmfVector::to_json(const std::string& params_json, double t) const {
    std::string out = "{\"params\": " + params_json + ", \"t\": " + fmt17(t) +
                      ", \"tail_bound\": " + fmt17(tail_bound) + ", \"pmf\": [";
    for (size_t n = 0; n < p.size(); ++n) {
        if (n) out += ", ";
        out += fmt17(p[n]);
    }
    out += "]}";
    return out;
}

PmfVector pmf_convolve(const PmfVector& a, const PmfVector& b) {
    if (a.p.empty() || b.p.empty()) throw std::invalid_argument("pmf_convolve: empty pmf");
    PmfVector c;
    c.p.assign(a.p.size() + b.p.size() - 1, 0.0);
    for (size_t i = 0; i < a.p.size(); ++i) {
        if (a.p[i] == 0.0) continue;
        for (size_t j = 0; j < b.p.size(); ++j) c.p[i + j] += a.p[i] * b.p[j];
    }
    c.tail_bound = a.tail_bound + b.tail_bound;
    return c;
}

PmfVector pmf_convolution_power(const PmfVector& pmf, int m) {
    if (m < 0) throw std::invalid_argument("pmf_convolution_power: m < 0");
    PmfVector result = PmfVector::point_mass_at_zero();
    PmfVector base = pmf;
    // binary exponentiation
    while (m > 0) {
        if (m & 1) result = pmf_convolve(result, base);
        m >>= 1;
        if (m) base = pmf_convolve(base, base);
    }
    return result;
}

}  // namespace igcp
