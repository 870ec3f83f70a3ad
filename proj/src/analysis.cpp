#include "lazybits/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "lazybits/stats.hpp"

namespace lazybits {

namespace {

mpz_class pow2(unsigned long k) {
    mpz_class p = 1;
    p <<= k;
    return p;
}

// Smallest K with (n+1)^2 * 2^(1-K) <= epsilon. Both series have k-th term
// at most (n+1)^2 * 2^-k, so summing k = 0..K leaves a tail of at most
// (n+1)^2 * 2^-K.
unsigned long truncation_index(unsigned n, const mpq_class& epsilon) {
    if (n < 1)
        throw std::invalid_argument("bounds: n must be >= 1");
    if (epsilon <= 0)
        throw std::invalid_argument("bounds: epsilon must be positive");
    mpq_class tail = mpq_class(2) * (n + 1) * (n + 1);
    unsigned long K = 0;
    while (tail > epsilon) {
        tail /= 2;
        ++K;
    }
    return K;
}

mpq_class certified_tail(unsigned n, unsigned long K) {
    mpq_class t(mpz_class((n + 1)) * (n + 1), pow2(K));
    t.canonicalize();
    return t;
}

} // namespace

BoundValue theorem1_bound(unsigned n, const mpq_class& epsilon) {
    const unsigned long K = truncation_index(n, epsilon);
    mpq_class sum = n + 1; // k = 0: the inner product vanishes for every i
    for (unsigned long k = 1; k <= K; ++k) {
        const mpz_class a = pow2(k + 1) - 1;
        const mpz_class b = pow2(k) - 1;
        // S = sum_i a^i b^{n+1-i} 2^{n-i}, running over i with one exact
        // multiply-divide per step
        mpz_class p;
        mpz_pow_ui(p.get_mpz_t(), b.get_mpz_t(), n + 1);
        mpz_class s = 0;
        for (unsigned i = 0; i <= n; ++i) {
            mpz_class shifted = p;
            shifted <<= (n - i);
            s += shifted;
            if (i < n) {
                p *= a;
                mpz_divexact(p.get_mpz_t(), p.get_mpz_t(), b.get_mpz_t());
            }
        }
        mpq_class frac(s, pow2(k * (n + 1) + n));
        frac.canonicalize();
        sum += (n + 1) - frac;
    }
    return {sum, certified_tail(n, K)};
}

BoundValue slack1_bound(unsigned n, const mpq_class& epsilon) {
    const unsigned long K = truncation_index(n, epsilon);
    mpq_class sum = n + 1; // k = 0 term
    for (unsigned long k = 1; k <= K; ++k) {
        mpz_class b = pow2(k) - 1;
        mpz_class bp;
        mpz_pow_ui(bp.get_mpz_t(), b.get_mpz_t(), n + 1);
        mpq_class frac(bp, pow2(k * (n + 1)));
        frac.canonicalize();
        sum += mpq_class(n + 1) * (1 - frac);
    }
    return {sum, certified_tail(n, K)};
}

mpz_class slack2_bound(unsigned n) {
    if (n < 1)
        throw std::invalid_argument("bounds: n must be >= 1");
    return mpz_class(2) * (n + 1) * (n + 1);
}

mpz_class lower_bound(unsigned n) {
    if (n < 1)
        throw std::invalid_argument("bounds: n must be >= 1");
    return mpz_class(n) + 1;
}

BoundReport bound_report(unsigned n, const mpq_class& epsilon) {
    return {n, lower_bound(n), theorem1_bound(n, epsilon),
            slack1_bound(n, epsilon), slack2_bound(n)};
}

mpz_class prop1_bound(const std::vector<long>& dims) {
    if (dims.empty())
        throw std::invalid_argument("prop1_bound: empty dims");
    mpz_class full = 1, inner = 1;
    for (long d : dims) {
        if (d < 1)
            throw std::invalid_argument("prop1_bound: dims must be >= 1");
        full *= d;
        inner *= d - 1;
    }
    return full - inner;
}

namespace {

// Odometer over boxes z, 1-based along each of the n+1 axes.
template <typename Fn>
void for_each_box(const std::vector<long>& dims, Fn&& body) {
    std::vector<long> z(dims.size(), 1);
    for (;;) {
        body(z);
        std::size_t a = 0;
        while (a < z.size() && ++z[a] > dims[a]) {
            z[a] = 1;
            ++a;
        }
        if (a == z.size())
            break;
    }
}

} // namespace

long count_crossed(const GridFunction& g) {
    const std::size_t n = g.arity();
    const auto& dims = g.dims();
    long crossed = 0;
    std::vector<long> corner(n);
    for_each_box(dims, [&](const std::vector<long>& z) {
        for (std::size_t j = 0; j < n; ++j)
            corner[j] = z[j];
        long up = g.lattice(corner);
        if (up <= z[n] - 1) // decided below the box
            return;
        for (std::size_t j = 0; j < n; ++j)
            corner[j] = z[j] - 1;
        long lo = g.lattice(corner);
        if (lo >= z[n]) // decided above
            return;
        ++crossed;
    });
    return crossed;
}

long count_crossed(const MonotoneOracle& f, const std::vector<long>& dims) {
    if (dims.size() != f.arity() + 1)
        throw std::invalid_argument("count_crossed: dims arity must be oracle arity + 1");
    const std::size_t n = f.arity();
    for (long d : dims)
        if (d < 1)
            throw std::invalid_argument("count_crossed: dims must be >= 1");
    long crossed = 0;
    std::vector<mpq_class> corner(n);
    const long out = dims[n];
    for_each_box(dims, [&](const std::vector<long>& z) {
        for (std::size_t j = 0; j < n; ++j) {
            corner[j] = mpq_class(z[j], dims[j]);
            corner[j].canonicalize();
        }
        mpq_class up = f.eval(corner);
        mpq_class accept_level(z[n] - 1, out);
        accept_level.canonicalize();
        if (up <= accept_level)
            return;
        for (std::size_t j = 0; j < n; ++j) {
            corner[j] = mpq_class(z[j] - 1, dims[j]);
            corner[j].canonicalize();
        }
        mpq_class lo = f.eval(corner);
        mpq_class reject_level(z[n], out);
        reject_level.canonicalize();
        if (lo >= reject_level)
            return;
        ++crossed;
    });
    return crossed;
}

namespace {

struct TrialAccum {
    std::uint64_t sum = 0;
    std::uint64_t sumsq = 0;
    std::uint64_t overflow = 0;
    std::vector<std::uint64_t> hist;

    void record(std::uint64_t cuts) {
        sum += cuts;
        sumsq += cuts * cuts;
        if (hist.size() <= cuts)
            hist.resize(cuts + 1, 0);
        ++hist[cuts];
    }

    void merge(const TrialAccum& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        overflow += o.overflow;
        if (hist.size() < o.hist.size())
            hist.resize(o.hist.size(), 0);
        for (std::size_t i = 0; i < o.hist.size(); ++i)
            hist[i] += o.hist[i];
    }
};

// Runs `trial(i)` for i in [0, trials) across workers. Integer accumulators
// merge exactly, so the result does not depend on the partition.
template <typename TrialFn>
TrialAccum run_trials(std::uint64_t trials, unsigned threads, TrialFn&& trial) {
    if (trials == 0)
        throw std::invalid_argument("trials must be >= 1");
    if (threads == 0)
        threads = 1;
    if (threads == 1) {
        TrialAccum acc;
        for (std::uint64_t i = 0; i < trials; ++i)
            trial(i, acc);
        return acc;
    }
    std::vector<TrialAccum> parts(threads);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::uint64_t lo = w * chunk;
                const std::uint64_t hi = std::min(trials, lo + chunk);
                for (std::uint64_t i = lo; i < hi; ++i)
                    trial(i, parts[w]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    TrialAccum acc;
    for (auto& p : parts)
        acc.merge(p);
    return acc;
}

BenchResult finalize(TrialAccum acc, std::uint64_t trials) {
    BenchResult r;
    r.trials = trials;
    r.overflow = acc.overflow;
    r.histogram = std::move(acc.hist);
    const std::uint64_t counted = trials - acc.overflow;
    if (counted == 0)
        throw std::runtime_error("bench: every trial hit the cut cap");
    const double mean = static_cast<double>(acc.sum) / static_cast<double>(counted);
    r.mean_bits = mean;
    if (counted > 1) {
        double var = (static_cast<double>(acc.sumsq) -
                      static_cast<double>(counted) * mean * mean) /
                     static_cast<double>(counted - 1);
        if (var < 0)
            var = 0;
        r.stderr_bits = std::sqrt(var / static_cast<double>(counted));
        r.ci95_halfwidth = 1.96 * r.stderr_bits;
    }
    return r;
}

} // namespace

BenchResult empirical_bits(const MonotoneOracle& f, const Strategy& strategy,
                           std::size_t n, std::uint64_t trials,
                           std::uint64_t seed, std::size_t cut_cap,
                           unsigned threads) {
    if (f.arity() != n)
        throw std::invalid_argument("empirical_bits: oracle arity mismatch");
    auto acc = run_trials(trials, threads, [&](std::uint64_t i, TrialAccum& a) {
        try {
            auto outcome = decide(f, strategy,
                                  make_pseudo_box(n + 1, derive_trial_seed(seed, i)),
                                  cut_cap);
            a.record(outcome.cuts.length());
        } catch (const CutBudgetExceeded&) {
            ++a.overflow;
        }
    });
    auto r = finalize(std::move(acc), trials);
    r.n = n;
    r.fn = f.name();
    r.strategy = strategy.name();
    r.seed = seed;
    r.cut_cap = cut_cap;
    return r;
}

BenchResult empirical_compare(const mpq_class& c, std::uint64_t trials,
                              std::uint64_t seed, std::size_t cut_cap,
                              unsigned threads) {
    auto acc = run_trials(trials, threads, [&](std::uint64_t i, TrialAccum& a) {
        try {
            PseudoRandomBitSource source(derive_trial_seed(seed, i));
            a.record(compare_to_constant(c, source, cut_cap).bits);
        } catch (const CutBudgetExceeded&) {
            ++a.overflow;
        }
    });
    auto r = finalize(std::move(acc), trials);
    r.n = 0;
    r.fn = "compare:" + c.get_str();
    r.strategy = "compare";
    r.seed = seed;
    r.cut_cap = cut_cap;
    return r;
}

std::uint64_t histogram_total(const std::vector<std::uint64_t>& histogram) {
    std::uint64_t total = 0;
    for (std::size_t c = 0; c < histogram.size(); ++c)
        total += c * histogram[c];
    return total;
}

std::uint64_t histogram_tail_sum(const std::vector<std::uint64_t>& histogram) {
    // sum over l >= 0 of #{trials with count > l}
    std::uint64_t total = 0;
    std::uint64_t above = 0;
    for (std::size_t c = histogram.size(); c-- > 1;) {
        above += histogram[c];
        total += above; // contributes for l = c-1
    }
    // each trial with count > l is counted once per l in [0, count-1]
    return total;
}

double fit_exponent(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 2)
        throw std::invalid_argument("fit_exponent: need at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, v] : pairs) {
        if (n <= 0 || v <= 0)
            throw std::invalid_argument("fit_exponent: points must be positive");
        const double x = std::log(n);
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(pairs.size());
    const double denom = m * sxx - sx * sx;
    if (denom <= 0)
        throw std::invalid_argument("fit_exponent: degenerate abscissae");
    return (m * sxy - sx * sy) / denom;
}

GofResult chi_square_gof(const std::vector<mpq_class>& samples,
                         const MonotoneOracle& f, unsigned bins) {
    if (f.arity() != 1 || !f.has_integral())
        throw std::invalid_argument("gof: needs a one-dimensional oracle with exact integral");
    if (bins < 2)
        throw std::invalid_argument("gof: need at least 2 bins");
    if (samples.empty())
        throw std::invalid_argument("gof: no samples");
    const mpq_class mass = f.integral(0, 1);
    if (mass <= 0)
        throw std::invalid_argument("gof: oracle has zero mass");

    GofResult result;
    result.bins.resize(bins);
    for (unsigned i = 0; i < bins; ++i) {
        auto& bin = result.bins[i];
        bin.lo = mpq_class(i, bins);
        bin.lo.canonicalize();
        bin.hi = mpq_class(i + 1, bins);
        bin.hi.canonicalize();
        mpq_class p = f.integral(bin.lo, bin.hi) / mass;
        bin.expected = mpq_class(p * static_cast<unsigned long>(samples.size())).get_d();
        if (bin.expected < 5.0)
            throw std::invalid_argument("gof: expected count below 5 in bin " +
                                        std::to_string(i) + ", use fewer bins");
    }
    for (const auto& x : samples) {
        if (x < 0 || x >= 1)
            throw std::invalid_argument("gof: sample outside [0,1)");
        // bin index floor(x * bins), exact
        mpz_class idx;
        mpz_class num = x.get_num() * bins;
        mpz_fdiv_q(idx.get_mpz_t(), num.get_mpz_t(), x.get_den().get_mpz_t());
        ++result.bins[idx.get_ui()].observed;
    }
    double stat = 0;
    for (const auto& bin : result.bins) {
        const double diff = static_cast<double>(bin.observed) - bin.expected;
        stat += diff * diff / bin.expected;
    }
    result.statistic = stat;
    result.p_value = chi_square_sf(stat, bins - 1);
    return result;
}

bool verify_tail_inequality(const mpq_class& x, unsigned k) {
    if (x < 0)
        throw std::invalid_argument("tail inequality: x must be >= 0");
    if (k < 1)
        throw std::invalid_argument("tail inequality: k must be >= 1");
    mpq_class base = 1 - x;
    mpq_class pw;
    mpz_class pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), base.get_num().get_mpz_t(), k);
    mpz_pow_ui(pd.get_mpz_t(), base.get_den().get_mpz_t(), k);
    pw = mpq_class(pn, pd);
    pw.canonicalize();
    mpq_class lhs = 1 - pw;
    mpq_class rhs = mpq_class(k) * x;
    if (x == 0 || k == 1)
        return lhs == rhs; // exact equality on the boundary cases
    return lhs < rhs;
}

} // namespace lazybits
