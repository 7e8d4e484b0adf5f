#include "igcp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace igcp {

double log_factorial(int n) {
    if (n < 0) throw std::invalid_argument("log_factorial: n < 0");
    static std::vector<double> table;
    static std::mutex m;
    if (n < 2) return 0.0;
    std::lock_guard<std::mutex> lock(m);
    if (table.empty()) {
        table.resize(2048);
        table[0] = table[1] = 0.0;
        for (size_t i = 2; i < table.size(); ++i)
            table[i] = table[i - 1] + std::log(double(i));
    }
    if (size_t(n) < table.size()) return table[n];
    return std::lgamma(double(n) + 1.0);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

double bell_polynomial(int n, double x) {
    if (n < 0) throw std::invalid_argument("bell_polynomial: n < 0");
    if (x < 0) throw std::invalid_argument("bell_polynomial: x < 0");
    return bell_polynomial_table(n, x).back();
}

std::vector<double> bell_polynomial_table(int n_max, double x) {
    if (n_max < 0) throw std::invalid_argument("bell_polynomial_table: n_max < 0");
    if (x < 0) throw std::invalid_argument("bell_polynomial_table: x < 0");
    std::vector<double> b(size_t(n_max) + 1);
    b[0] = 1.0;
    // Pascal row for C(n, m), updated in place each step
    std::vector<double> choose{1.0};
    for (int n = 0; n < n_max; ++n) {
        double s = 0.0;
        for (int m = 0; m <= n; ++m) s += choose[m] * b[m];
        b[n + 1] = x * s;
        if (!std::isfinite(b[n + 1]))
            throw std::range_error("bell_polynomial: value overflows floating range at n=" +
                                   std::to_string(n + 1));
        choose.push_back(1.0);
        for (int m = n; m >= 1; --m) choose[m] += choose[m - 1];
    }
    return b;
}

SeriesResult mittag_leffler_3p(double alpha, double beta, double delta, double x,
                               double tol, long max_terms) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("mittag_leffler_3p: alpha not in (0,1]");
    if (!(beta > 0.0)) throw std::domain_error("mittag_leffler_3p: beta <= 0");
    if (!(delta > 0.0)) throw std::domain_error("mittag_leffler_3p: delta <= 0");

    const double log_gamma_delta = std::lgamma(delta);
    const double log_abs_x = (x == 0.0) ? 0.0 : std::log(std::abs(x));

    double sum = 0.0, comp = 0.0;  // Kahan
    double prev_abs = std::numeric_limits<double>::infinity();
    long j = 0;
    double term = 0.0, abs_term = 0.0;
    int decreasing_run = 0;
    for (; j < max_terms; ++j) {
        double log_abs = std::lgamma(j + delta) - log_gamma_delta - std::lgamma(double(j) + 1.0)
                         - std::lgamma(j * alpha + beta);
        if (j > 0) log_abs += j * log_abs_x;
        abs_term = std::exp(log_abs);
        term = (x < 0.0 && (j & 1)) ? -abs_term : abs_term;

        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        if (x == 0.0) { j = 1; break; }

        if (abs_term < prev_abs) ++decreasing_run; else decreasing_run = 0;
        if (decreasing_run >= 2 && abs_term < tol * std::max(std::abs(sum), 1e-300)) {
            ++j;
            break;
        }
        prev_abs = abs_term;
    }
    if (j >= max_terms)
        throw truncation_error("mittag_leffler_3p: no convergence within term cap", sum, j);

    // geometric tail certificate from the first omitted term
    double log_next = std::lgamma(j + delta) - log_gamma_delta - std::lgamma(double(j) + 1.0)
                      - std::lgamma(j * alpha + beta) + j * log_abs_x;
    double next_abs = (x == 0.0) ? 0.0 : std::exp(log_next);
    double ratio = (abs_term > 0.0) ? std::min(next_abs / abs_term, 0.9) : 0.0;
    double tail = next_abs / (1.0 - ratio);

    return SeriesResult{sum, j, tail};
}

namespace {

// regularized lower incomplete gamma by series, x < s+1
double gamma_p_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw truncation_error("gamma_p_series: no convergence", sum, 1000);
}

// regularized upper incomplete gamma by continued fraction (Lentz), x >= s+1
double gamma_q_cf(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -double(i) * (double(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw truncation_error("gamma_q_cf: no convergence", h, 1000);
}

}  // namespace

double regularized_gamma_p(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("regularized_gamma_p: s <= 0");
    if (x < 0.0) throw std::domain_error("regularized_gamma_p: x < 0");
    if (x == 0.0) return 0.0;
    return (x < s + 1.0) ? gamma_p_series(s, x) : 1.0 - gamma_q_cf(s, x);
}

double regularized_gamma_q(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("regularized_gamma_q: s <= 0");
    if (x < 0.0) throw std::domain_error("regularized_gamma_q: x < 0");
    if (x == 0.0) return 1.0;
    return (x < s + 1.0) ? 1.0 - gamma_p_series(s, x) : gamma_q_cf(s, x);
}

double lower_incomplete_gamma(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("lower_incomplete_gamma: s <= 0");
    return regularized_gamma_p(s, x) * std::exp(std::lgamma(s));
}

long long falling_factorial(long long j, int m) {
    if (m < 0) throw std::invalid_argument("falling_factorial: m < 0");
    long long r = 1;
    for (int i = 0; i < m; ++i) r *= (j - i);
    return r;
}

void for_each_weighted_partition(int k, int n,
                                 const std::function<void(const std::vector<int>&)>& fn) {
    if (k < 1) throw std::invalid_argument("for_each_weighted_partition: k < 1");
    if (n < 0) throw std::invalid_argument("for_each_weighted_partition: n < 0");
    std::vector<int> x(size_t(k), 0);
    if (k == 1) {
        x[0] = n;
        fn(x);
        return;
    }
    // explicit DFS over x_k .. x_2, each ascending; x_1 takes the remainder
    struct Frame { int j; int rem; int xj; };
    std::vector<Frame> stack;
    stack.push_back({k, n, 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.xj * f.j > f.rem) {
            x[size_t(f.j) - 1] = 0;
            stack.pop_back();
            if (!stack.empty()) ++stack.back().xj;
            continue;
        }
        x[size_t(f.j) - 1] = f.xj;
        int rem = f.rem - f.xj * f.j;
        if (f.j == 2) {
            x[0] = rem;
            fn(x);
            ++f.xj;
        } else {
            stack.push_back({f.j - 1, rem, 0});
        }
    }
}

std::vector<WeightedPartition> enumerate_weighted_partitions(int k, int n) {
    std::vector<WeightedPartition> out;
    for_each_weighted_partition(k, n, [&](const std::vector<int>& x) {
        out.push_back(WeightedPartition{x, n});
    });
    return out;
}

long long count_weighted_partitions(int k, int n) {
    // partitions of n into parts <= k: standard DP
    std::vector<long long> dp(size_t(n) + 1, 0);
    dp[0] = 1;
    for (int j = 1; j <= k; ++j)
        for (int v = j; v <= n; ++v) dp[size_t(v)] += dp[size_t(v - j)];
    return dp[size_t(n)];
}

void for_each_composition(int total, int parts,
                          const std::function<void(const std::vector<int>&)>& fn) {
    if (parts < 1) throw std::invalid_argument("for_each_composition: parts < 1");
    if (total < 0) throw std::invalid_argument("for_each_composition: total < 0");
    std::vector<int> r(size_t(parts), 0);
    if (parts == 1) {
        r[0] = total;
        fn(r);
        return;
    }
    struct Frame { int pos; int rem; int v; };
    std::vector<Frame> stack;
    stack.push_back({0, total, total});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.v < 0) {
            stack.pop_back();
            if (!stack.empty()) --stack.back().v;
            continue;
        }
        r[size_t(f.pos)] = f.v;
        int rem = f.rem - f.v;
        if (f.pos == parts - 2) {
            r[size_t(parts) - 1] = rem;
            fn(r);
            --f.v;
        } else {
            stack.push_back({f.pos + 1, rem, rem});
        }
    }
}

std::vector<std::vector<int>> enumerate_compositions(int total, int parts) {
    std::vector<std::vector<int>> out;
    for_each_composition(total, parts, [&](const std::vector<int>& r) { out.push_back(r); });
    return out;
}

long long count_compositions(int total, int parts) {
    double c = binomial(total + parts - 1, parts - 1);
    return static_cast<long long>(c + 0.5);
}

}  // namespace igcp
