#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <string>
#include <utility>
#include <vector>

#include "lazybits/engine.hpp"
#include "lazybits/monofn.hpp"

namespace lazybits {

// Truncated series value plus a certified bound on the discarded tail, so
// value <= true sum <= value + tail.
struct BoundValue {
    mpq_class value;
    mpq_class tail;
    double to_double() const { return value.get_d(); }
};

struct BoundReport {
    unsigned n = 0;
    mpz_class lower;     // n+1
    BoundValue theorem1; // series over k of sum_i (1 - (2^{k+1}-1)^i (2^k-1)^{n+1-i} / 2^{k(n+1)+i})
    BoundValue slack1;   // series over k of (n+1)(1 - (1-2^-k)^{n+1})
    mpz_class slack2;    // 2(n+1)^2
};

BoundValue theorem1_bound(unsigned n, const mpq_class& epsilon);
BoundValue slack1_bound(unsigned n, const mpq_class& epsilon);
mpz_class slack2_bound(unsigned n);
mpz_class lower_bound(unsigned n);
BoundReport bound_report(unsigned n, const mpq_class& epsilon);

// Pi M_j - Pi (M_j - 1): the cap on how many grid boxes a monotone function
// can cross.
mpz_class prop1_bound(const std::vector<long>& dims);

// Crossed-box count over the full grid, using the engine's non-strict corner
// tests (box z crossed iff g(upper) > z_{n+1}-1 and g(lower) < z_{n+1}).
long count_crossed(const GridFunction& g);

// Same predicate for a continuous oracle rescaled onto the grid: corner j of
// box z sits at z_j / M_j, thresholds at z_{n+1}/M_{n+1}.
long count_crossed(const MonotoneOracle& f, const std::vector<long>& dims);

struct BenchResult {
    std::size_t n = 0;
    std::string fn;
    std::string strategy;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t cut_cap = 0;
    double mean_bits = 0;
    double stderr_bits = 0;
    double ci95_halfwidth = 0;
    std::uint64_t overflow = 0; // trials that hit the cut cap, excluded from mean
    std::vector<std::uint64_t> histogram; // histogram[c] = trials with exactly c cuts
};

// Mean cut count of decide over seeded trials. Trial t uses
// derive_trial_seed(seed, t); aggregation is in trial-index order, so the
// result is identical for any thread count.
BenchResult empirical_bits(const MonotoneOracle& f, const Strategy& strategy,
                           std::size_t n, std::uint64_t trials,
                           std::uint64_t seed,
                           std::size_t cut_cap = kDefaultCutCap,
                           unsigned threads = 1);

// Same harness for compare_to_constant.
BenchResult empirical_compare(const mpq_class& c, std::uint64_t trials,
                              std::uint64_t seed,
                              std::size_t cut_cap = kDefaultCutCap,
                              unsigned threads = 1);

// Exact integer identities on a cut-count histogram: sum_c c*h[c] and
// sum_l #{trials with count > l} agree term for term with the mean and
// tail-sum estimators.
std::uint64_t histogram_total(const std::vector<std::uint64_t>& histogram);
std::uint64_t histogram_tail_sum(const std::vector<std::uint64_t>& histogram);

// OLS slope of log(value) against log(n).
double fit_exponent(const std::vector<std::pair<double, double>>& pairs);

struct GofBin {
    mpq_class lo, hi;
    std::uint64_t observed = 0;
    double expected = 0;
};

struct GofResult {
    double statistic = 0;
    double p_value = 0;
    std::vector<GofBin> bins;
};

// Chi-square against exact bin masses of the density proportional to f
// (one-dimensional oracles with an exact integral only).
GofResult chi_square_gof(const std::vector<mpq_class>& samples,
                         const MonotoneOracle& f, unsigned bins);

// 1 - (1-x)^k <= kx, exactly; strict for x > 0 and k >= 2.
bool verify_tail_inequality(const mpq_class& x, unsigned k);

} // namespace lazybits
