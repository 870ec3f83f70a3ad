#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lazybits {

// Componentwise-nondecreasing function on the unit cube, evaluated exactly at
// rational points. arity() is the number of spatial coordinates n; the
// threshold coordinate x_{n+1} is not an argument.
class MonotoneOracle {
public:
    virtual ~MonotoneOracle() = default;

    virtual std::size_t arity() const = 0;
    virtual mpq_class eval(std::span<const mpq_class> x) const = 0;

    // Canonical spec string, e.g. "constant:1/2" or "staircase:8".
    virtual std::string name() const = 0;

    // Exact antiderivative over [a,b], available for the one-dimensional
    // builtins (used by the goodness-of-fit harness).
    virtual bool has_integral() const { return false; }
    virtual mpq_class integral(const mpq_class& a, const mpq_class& b) const;
};

// min(1 - 2^-(n+1), (2^{n+1} - 1) * min_i x_i) with n = x.size().
// Any strategy needs at least n+1 cuts to decide against this one.
mpq_class eval_h(std::span<const mpq_class> x);

// Builtin specs: "constant:<c>", "identity", "mean", "min_coord", "product",
// "hard", "staircase:<levels>". Throws std::invalid_argument for unknown
// names, bad parameters, or an arity the builtin does not support.
std::unique_ptr<MonotoneOracle> make_oracle(const std::string& spec,
                                            std::size_t arity);

std::vector<std::string> builtin_oracle_specs();

struct MonotoneViolation {
    std::vector<mpq_class> lo, hi; // lo <= hi componentwise, f(lo) > f(hi)
    mpq_class f_lo, f_hi;
};

// Randomized spot check: dyadic points paired with dominated points. Empty
// result means no violation found.
std::optional<MonotoneViolation> check_monotone(const MonotoneOracle& f,
                                                std::uint64_t seed,
                                                std::uint64_t trials);

// Nondecreasing integer function on a cell grid: dims = (M_1,...,M_{n+1}),
// one value in [0, M_{n+1}] per cell of the first n axes.
class GridFunction {
public:
    GridFunction(std::vector<long> dims, std::vector<long> values);

    std::size_t arity() const { return dims_.size() - 1; } // spatial axes
    const std::vector<long>& dims() const { return dims_; }
    const std::vector<long>& values() const { return values_; }

    long cell(std::span<const long> idx) const;

    // Value at a lattice point p in prod [0, M_j]; upper boundary clamps to
    // the last cell along each axis.
    long lattice(std::span<const long> point) const;

private:
    std::vector<long> dims_;
    std::vector<long> values_;
    std::vector<std::size_t> strides_;
};

// Uniform random monotone staircase on the given grid: i.i.d. cell values
// swept to a running componentwise max.
GridFunction random_staircase(std::uint64_t seed, const std::vector<long>& dims);

} // namespace lazybits
