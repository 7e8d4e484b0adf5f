#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace igcp {

// Thrown when a series or sum enumeration exceeds its configured work budget.
// Carries the partial sum accumulated so far.
class budget_error : public std::runtime_error {
public:
    budget_error(const std::string& what, double partial)
        : std::runtime_error(what), partial_sum(partial) {}
    double partial_sum;
};

// Thrown when an infinite series fails to converge within the term cap.
class truncation_error : public std::runtime_error {
public:
    truncation_error(const std::string& what, double partial, long terms)
        : std::runtime_error(what), partial_sum(partial), terms_used(terms) {}
    double partial_sum;
    long terms_used;
};

// Value of a truncated series together with a certificate: the true value
// differs from `value` by at most `tail_bound`.
struct SeriesResult {
    double value = 0.0;
    long terms_used = 0;
    double tail_bound = 0.0;
};

// One solution of x_1 + 2 x_2 + ... + k x_k = n with x_j >= 0.
struct WeightedPartition {
    std::vector<int> parts;  // multiplicities x_1..x_k
    int weight = 0;          // n

    // number of parts counted with multiplicity, z_k = sum x_j
    int part_count() const {
        int z = 0;
        for (int x : parts) z += x;
        return z;
    }
};

// log(n!), cached
double log_factorial(int n);

// C(n, k) as double
double binomial(int n, int k);

// nth Bell (Touchard) polynomial B_n(x) = e^{-x} sum_r r^n x^r / r!,
// evaluated by the finite Touchard recurrence
//   B_{n+1}(x) = x * sum_{m<=n} C(n,m) B_m(x).
// Throws std::range_error if the value leaves floating range.
double bell_polynomial(int n, double x);

// B_0(x) .. B_{n_max}(x) in one pass
std::vector<double> bell_polynomial_table(int n_max, double x);

// Three-parameter Mittag-Leffler function
//   E^delta_{alpha,beta}(x) = sum_j Gamma(j+delta) x^j / (Gamma(delta) j! Gamma(j alpha + beta)).
// Requires alpha in (0,1], beta > 0, delta > 0. Negative x is summed with
// compensated accumulation. Throws truncation_error past `max_terms`.
SeriesResult mittag_leffler_3p(double alpha, double beta, double delta, double x,
                               double tol = 1e-12, long max_terms = 10000);

// gamma(s,x) = int_0^x e^{-u} u^{s-1} du, s > 0
double lower_incomplete_gamma(double s, double x);

// regularized P(s,x) = gamma(s,x)/Gamma(s) and Q(s,x) = 1 - P(s,x)
double regularized_gamma_p(double s, double x);
double regularized_gamma_q(double s, double x);

// falling factorial (j)_m = j (j-1) ... (j-m+1), (j)_0 = 1
long long falling_factorial(long long j, int m);

// All solutions of x_1 + 2 x_2 + ... + k x_k = n, each emitted once.
// Order is deterministic: x_k varies slowest, ascending.
std::vector<WeightedPartition> enumerate_weighted_partitions(int k, int n);

// Visitor form of the above; fn receives the multiplicity vector x_1..x_k.
void for_each_weighted_partition(int k, int n,
                                 const std::function<void(const std::vector<int>&)>& fn);

// number of weighted partitions without enumerating them
long long count_weighted_partitions(int k, int n);

// All tuples (r_1..r_parts) of non-negative integers with sum `total`.
// First coordinate descends; count is C(total+parts-1, parts-1).
std::vector<std::vector<int>> enumerate_compositions(int total, int parts);

void for_each_composition(int total, int parts,
                          const std::function<void(const std::vector<int>&)>& fn);

long long count_compositions(int total, int parts);

}  // namespace igcp
