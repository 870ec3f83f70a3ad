#include "lazybits/monofn.hpp"

#include <algorithm>
#include <stdexcept>

#include "lazybits/bitsource.hpp"
#include "lazybits/ratio.hpp"

namespace lazybits {

namespace {

mpz_class pow2(unsigned long k) {
    mpz_class p = 1;
    p <<= k;
    return p;
}

void check_point(std::span<const mpq_class> x, std::size_t arity) {
    if (x.size() != arity)
        throw std::invalid_argument("oracle: wrong number of coordinates");
    for (const auto& c : x)
        if (c < 0 || c > 1)
            throw std::invalid_argument("oracle: coordinate outside [0,1]");
}

void check_range(const mpq_class& a, const mpq_class& b) {
    if (a < 0 || b > 1 || a > b)
        throw std::invalid_argument("integral: need 0 <= a <= b <= 1");
}

// Integral of min(cap, slope*x) over [a,b]; slope > 0, cap >= 0.
mpq_class capped_linear_integral(const mpq_class& slope, const mpq_class& cap,
                                 const mpq_class& a, const mpq_class& b) {
    mpq_class knee = cap / slope;
    // explicit return type: gmp expression templates must not outlive their operands
    auto ramp = [&](const mpq_class& lo, const mpq_class& hi) -> mpq_class {
        return slope * (hi * hi - lo * lo) / 2;
    };
    if (b <= knee)
        return ramp(a, b);
    if (a >= knee)
        return cap * (b - a);
    return ramp(a, knee) + cap * (b - knee);
}

class ConstantOracle final : public MonotoneOracle {
public:
    ConstantOracle(mpq_class c, std::size_t n) : c_(std::move(c)), n_(n) {
        if (n_ == 0)
            throw std::invalid_argument("constant: arity must be positive");
        if (c_ < 0 || c_ >= 1)
            throw std::invalid_argument("constant: value must lie in [0,1)");
    }
    std::size_t arity() const override { return n_; }
    mpq_class eval(std::span<const mpq_class> x) const override {
        check_point(x, n_);
        return c_;
    }
    std::string name() const override { return "constant:" + c_.get_str(); }
    bool has_integral() const override { return n_ == 1; }
    mpq_class integral(const mpq_class& a, const mpq_class& b) const override {
        if (!has_integral())
            return MonotoneOracle::integral(a, b);
        check_range(a, b);
        return c_ * (b - a);
    }

private:
    mpq_class c_;
    std::size_t n_;
};

class IdentityOracle final : public MonotoneOracle {
public:
    explicit IdentityOracle(std::size_t n) {
        if (n != 1)
            throw std::invalid_argument("identity: arity must be 1");
    }
    std::size_t arity() const override { return 1; }
    mpq_class eval(std::span<const mpq_class> x) const override {
        check_point(x, 1);
        return x[0];
    }
    std::string name() const override { return "identity"; }
    bool has_integral() const override { return true; }
    mpq_class integral(const mpq_class& a, const mpq_class& b) const override {
        if (!has_integral())
            return MonotoneOracle::integral(a, b);
        check_range(a, b);
        return (b * b - a * a) / 2;
    }
};

class MeanOracle final : public MonotoneOracle {
public:
    explicit MeanOracle(std::size_t n) : n_(n) {
        if (n_ == 0)
            throw std::invalid_argument("mean: arity must be positive");
    }
    std::size_t arity() const override { return n_; }
    mpq_class eval(std::span<const mpq_class> x) const override {
        check_point(x, n_);
        mpq_class sum = 0;
        for (const auto& c : x)
            sum += c;
        return sum / static_cast<unsigned long>(n_ + 1);
    }
    std::string name() const override { return "mean"; }
    bool has_integral() const override { return n_ == 1; }
    mpq_class integral(const mpq_class& a, const mpq_class& b) const override {
        if (!has_integral())
            return MonotoneOracle::integral(a, b);
        check_range(a, b);
        return (b * b - a * a) / 4;
    }

private:
    std::size_t n_;
};

class MinCoordOracle final : public MonotoneOracle {
public:
    explicit MinCoordOracle(std::size_t n) : n_(n) {
        if (n_ == 0)
            throw std::invalid_argument("min_coord: arity must be positive");
    }
    std::size_t arity() const override { return n_; }
    mpq_class eval(std::span<const mpq_class> x) const override {
        check_point(x, n_);
        mpq_class m = x[0];
        for (std::size_t i = 1; i < x.size(); ++i)
            if (x[i] < m)
                m = x[i];
        return m;
    }
    std::string name() const override { return "min_coord"; }
    bool has_integral() const override { return n_ == 1; }
    mpq_class integral(const mpq_class& a, const mpq_class& b) const override {
        if (!has_integral())
            return MonotoneOracle::integral(a, b);
        check_range(a, b);
        return (b * b - a * a) / 2;
    }

private:
    std::size_t n_;
};

class ProductOracle final : public MonotoneOracle {
public:
    explicit ProductOracle(std::size_t n) : n_(n) {
        if (n_ == 0)
            throw std::invalid_argument("product: arity must be positive");
        cap_ = mpq_class(pow2(62) - 1, pow2(62));
        cap_.canonicalize();
    }
    std::size_t arity() const override { return n_; }
    mpq_class eval(std::span<const mpq_class> x) const override {
        check_point(x, n_);
        mpq_class p = 1;
        for (const auto& c : x)
            p *= c;
        return std::min(p, cap_);
    }
    std::string name() const override { return "product"; }
    bool has_integral() const override { return n_ == 1; }
    mpq_class integral(const mpq_class& a, const mpq_class& b) const override {
        if (!has_integral())
            return MonotoneOracle::integral(a, b);
        check_range(a, b);
        return capped_linear_integral(1, cap_, a, b);
    }

private:
    std::size_t n_;
    mpq_class cap_;
};

class HardOracle final : public MonotoneOracle {
public:
    explicit HardOracle(std::size_t n) : n_(n) {
        if (n_ == 0)
            throw std::invalid_argument("hard: arity must be positive");
    }
    std::size_t arity() const override { return n_; }
    mpq_class eval(std::span<const mpq_class> x) const override {
        check_point(x, n_);
        return eval_h(x);
    }
    std::string name() const override { return "hard"; }
    bool has_integral() const override { return n_ == 1; }
    mpq_class integral(const mpq_class& a, const mpq_class& b) const override {
        if (!has_integral())
            return MonotoneOracle::integral(a, b);
        check_range(a, b);
        // n = 1: min(3/4, 3x).
        return capped_linear_integral(3, mpq_class(3, 4), a, b);
    }

private:
    std::size_t n_;
};

class StaircaseOracle final : public MonotoneOracle {
public:
    StaircaseOracle(std::size_t n, long levels) : n_(n), levels_(levels) {
        if (n_ == 0)
            throw std::invalid_argument("staircase: arity must be positive");
        if (levels_ < 1 || levels_ > 62)
            throw std::invalid_argument("staircase: levels must lie in [1,62]");
        den_ = pow2(static_cast<unsigned long>(levels_));
    }
    std::size_t arity() const override { return n_; }
    mpq_class eval(std::span<const mpq_class> x) const override {
        check_point(x, n_);
        mpq_class t = 0;
        for (const auto& c : x)
            t += c;
        t /= static_cast<unsigned long>(n_);
        // floor(t * 2^L) / 2^L, last step flattened so values stay below 1
        mpz_class step;
        mpz_fdiv_q(step.get_mpz_t(), mpz_class(t.get_num() * den_).get_mpz_t(),
                   t.get_den().get_mpz_t());
        if (step >= den_ - 1)
            step = den_ - 1;
        mpq_class v(step, den_);
        v.canonicalize();
        return v;
    }
    std::string name() const override {
        return "staircase:" + std::to_string(levels_);
    }
    bool has_integral() const override { return n_ == 1 && levels_ <= 24; }
    mpq_class integral(const mpq_class& a, const mpq_class& b) const override {
        if (!has_integral())
            return MonotoneOracle::integral(a, b);
        check_range(a, b);
        // step by step across [a,b]
        auto floor_scaled = [&](const mpq_class& t) {
            mpz_class f;
            mpz_fdiv_q(f.get_mpz_t(), mpz_class(t.get_num() * den_).get_mpz_t(),
                       t.get_den().get_mpz_t());
            return f;
        };
        mpz_class ia = floor_scaled(a), ib = floor_scaled(b);
        mpq_class total = 0;
        for (mpz_class i = ia; i <= ib; ++i) {
            mpq_class lo(i, den_), hi(i + 1, den_);
            lo.canonicalize();
            hi.canonicalize();
            lo = std::max(lo, a);
            hi = std::min(hi, b);
            if (hi <= lo)
                continue;
            mpz_class step = i >= den_ - 1 ? mpz_class(den_ - 1) : i;
            mpq_class v(step, den_);
            v.canonicalize();
            total += v * (hi - lo);
        }
        return total;
    }

private:
    std::size_t n_;
    long levels_;
    mpz_class den_;
};

} // namespace

mpq_class MonotoneOracle::integral(const mpq_class&, const mpq_class&) const {
    throw std::logic_error("oracle '" + name() + "' has no exact integral");
}

mpq_class eval_h(std::span<const mpq_class> x) {
    if (x.empty())
        throw std::invalid_argument("eval_h: needs at least one coordinate");
    mpq_class m = x[0];
    for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i] < m)
            m = x[i];
    unsigned long n = x.size();
    mpz_class p = pow2(n + 1);
    mpq_class cap(p - 1, p);
    cap.canonicalize();
    mpq_class ramp = m * mpq_class(p - 1);
    return std::min(cap, ramp);
}

std::unique_ptr<MonotoneOracle> make_oracle(const std::string& spec,
                                            std::size_t arity) {
    std::string name = spec;
    std::string param;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        param = spec.substr(colon + 1);
    }
    auto no_param = [&] {
        if (!param.empty())
            throw std::invalid_argument("function '" + name + "' takes no parameter");
    };
    if (name == "constant") {
        if (param.empty())
            throw std::invalid_argument("constant needs a value, e.g. constant:1/2");
        return std::make_unique<ConstantOracle>(parse_ratio(param), arity);
    }
    if (name == "identity") {
        no_param();
        return std::make_unique<IdentityOracle>(arity);
    }
    if (name == "mean") {
        no_param();
        return std::make_unique<MeanOracle>(arity);
    }
    if (name == "min_coord") {
        no_param();
        return std::make_unique<MinCoordOracle>(arity);
    }
    if (name == "product") {
        no_param();
        return std::make_unique<ProductOracle>(arity);
    }
    if (name == "hard") {
        no_param();
        return std::make_unique<HardOracle>(arity);
    }
    if (name == "staircase") {
        if (param.empty())
            throw std::invalid_argument("staircase needs a level count, e.g. staircase:8");
        std::size_t used = 0;
        long levels = std::stol(param, &used);
        if (used != param.size())
            throw std::invalid_argument("staircase: bad level count '" + param + "'");
        return std::make_unique<StaircaseOracle>(arity, levels);
    }
    throw std::invalid_argument("unknown function '" + name + "'");
}

std::vector<std::string> builtin_oracle_specs() {
    return {"constant:1/2", "identity",     "mean", "min_coord",
            "product",      "staircase:8", "hard"};
}

std::optional<MonotoneViolation> check_monotone(const MonotoneOracle& f,
                                                std::uint64_t seed,
                                                std::uint64_t trials) {
    Xoshiro256StarStar rng(seed);
    const std::size_t n = f.arity();
    const mpz_class den = pow2(32);
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::vector<mpq_class> hi(n), lo(n);
        for (std::size_t j = 0; j < n; ++j) {
            std::uint64_t m = rng.next() >> 32;
            hi[j] = mpq_class(mpz_class(m), den);
            hi[j].canonicalize();
            // dominated point: keep or shrink each coordinate
            std::uint64_t m2 = (rng.next() & 1) ? m : rng.next_below(m + 1);
            lo[j] = mpq_class(mpz_class(m2), den);
            lo[j].canonicalize();
        }
        mpq_class f_hi = f.eval(hi);
        mpq_class f_lo = f.eval(lo);
        if (f_lo > f_hi)
            return MonotoneViolation{std::move(lo), std::move(hi),
                                     std::move(f_lo), std::move(f_hi)};
    }
    return std::nullopt;
}

GridFunction::GridFunction(std::vector<long> dims, std::vector<long> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
    if (dims_.size() < 2)
        throw std::invalid_argument("grid: needs at least one spatial axis plus output dim");
    std::size_t cells = 1;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
        if (dims_[a] < 1)
            throw std::invalid_argument("grid: dims must be >= 1");
        if (a + 1 < dims_.size())
            cells *= static_cast<std::size_t>(dims_[a]);
    }
    if (values_.size() != cells)
        throw std::invalid_argument("grid: value count does not match dims");
    for (long v : values_)
        if (v < 0 || v > dims_.back())
            throw std::invalid_argument("grid: value outside [0, M_{n+1}]");

    const std::size_t n = arity();
    strides_.assign(n, 1);
    for (std::size_t a = 1; a < n; ++a)
        strides_[a] = strides_[a - 1] * static_cast<std::size_t>(dims_[a - 1]);

    // reject non-monotone staircases
    for (std::size_t i = 0; i < values_.size(); ++i) {
        for (std::size_t a = 0; a < n; ++a) {
            std::size_t idx = (i / strides_[a]) % static_cast<std::size_t>(dims_[a]);
            if (idx > 0 && values_[i] < values_[i - strides_[a]])
                throw std::invalid_argument("grid: values not componentwise nondecreasing");
        }
    }
}

long GridFunction::cell(std::span<const long> idx) const {
    const std::size_t n = arity();
    if (idx.size() != n)
        throw std::invalid_argument("grid: wrong index arity");
    std::size_t flat = 0;
    for (std::size_t a = 0; a < n; ++a) {
        if (idx[a] < 0 || idx[a] >= dims_[a])
            throw std::out_of_range("grid: cell index out of range");
        flat += static_cast<std::size_t>(idx[a]) * strides_[a];
    }
    return values_[flat];
}

long GridFunction::lattice(std::span<const long> point) const {
    const std::size_t n = arity();
    if (point.size() != n)
        throw std::invalid_argument("grid: wrong point arity");
    std::size_t flat = 0;
    for (std::size_t a = 0; a < n; ++a) {
        if (point[a] < 0 || point[a] > dims_[a])
            throw std::out_of_range("grid: lattice point out of range");
        long idx = std::min(point[a], dims_[a] - 1);
        flat += static_cast<std::size_t>(idx) * strides_[a];
    }
    return values_[flat];
}

GridFunction random_staircase(std::uint64_t seed, const std::vector<long>& dims) {
    if (dims.size() < 2)
        throw std::invalid_argument("random_staircase: needs at least 2 dims");
    for (long d : dims)
        if (d < 1)
            throw std::invalid_argument("random_staircase: dims must be >= 1");
    const std::size_t n = dims.size() - 1;
    std::size_t cells = 1;
    for (std::size_t a = 0; a < n; ++a)
        cells *= static_cast<std::size_t>(dims[a]);

    Xoshiro256StarStar rng(seed);
    std::vector<long> values(cells);
    const auto out = static_cast<std::uint64_t>(dims.back());
    for (auto& v : values)
        v = static_cast<long>(rng.next_below(out + 1));

    // running componentwise max makes the staircase monotone
    std::vector<std::size_t> strides(n, 1);
    for (std::size_t a = 1; a < n; ++a)
        strides[a] = strides[a - 1] * static_cast<std::size_t>(dims[a - 1]);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t i = 0; i < cells; ++i) {
            std::size_t idx = (i / strides[a]) % static_cast<std::size_t>(dims[a]);
            if (idx > 0)
                values[i] = std::max(values[i], values[i - strides[a]]);
        }
    }
    return GridFunction(dims, std::move(values));
}

} // namespace lazybits
