#include "lazybits/engine.hpp"

#include <cassert>

namespace lazybits {

std::unique_ptr<Strategy> make_strategy(const std::string& name) {
    if (name == "alt")
        return std::make_unique<AltStrategy>();
    if (name == "threshfirst")
        return std::make_unique<ThreshFirstStrategy>();
    if (name == "twobit")
        return std::make_unique<TwoBitStrategy>();
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::vector<std::string> shipped_strategy_names() {
    return {"alt", "threshfirst", "twobit"};
}

const char* to_string(Verdict v) {
    return v == Verdict::LT ? "LT" : "GT";
}

const char* to_string(Side s) {
    return s == Side::LESS ? "LESS" : "GREATER";
}

namespace {

void check_arity(const MonotoneOracle& f, const FeasibleBox& box) {
    if (box.arity() != f.arity() + 1)
        throw std::invalid_argument("decision: box arity must be oracle arity + 1");
}

} // namespace

bool can_accept(const MonotoneOracle& f, const FeasibleBox& box) {
    check_arity(f, box);
    const std::size_t n = f.arity();
    // every point of the box has f(x) <= f(upper corner) <= x*_{n+1} <= x_{n+1}
    return f.eval(box.uppers().first(n)) <= box.lower(n);
}

bool can_reject(const MonotoneOracle& f, const FeasibleBox& box) {
    check_arity(f, box);
    const std::size_t n = f.arity();
    return f.eval(box.lowers().first(n)) >= box.upper(n);
}

bool crosses(const MonotoneOracle& f, const FeasibleBox& box) {
    return !can_accept(f, box) && !can_reject(f, box);
}

CutBudgetExceeded::CutBudgetExceeded(CutString cuts_,
                                     std::vector<DyadicRational> prefixes_,
                                     std::size_t cap_)
    : std::runtime_error("cut budget exceeded after " +
                         std::to_string(cuts_.length()) + " cuts (cap " +
                         std::to_string(cap_) + ")"),
      cuts(std::move(cuts_)), prefixes(std::move(prefixes_)), cap(cap_) {}

AttemptBudgetExceeded::AttemptBudgetExceeded(std::uint64_t cap_)
    : std::runtime_error("attempt budget exceeded (cap " + std::to_string(cap_) +
                         ")"),
      cap(cap_) {}

DecisionOutcome decide(const MonotoneOracle& f, const Strategy& strategy,
                       FeasibleBox box, std::size_t cut_cap) {
    if (cut_cap < 1)
        throw std::invalid_argument("decide: cut_cap must be >= 1");
    check_arity(f, box);
    const std::size_t n = f.arity();
    CutString cuts(box.arity());
    for (;;) {
        const bool lt = f.eval(box.uppers().first(n)) <= box.lower(n);
        const bool gt = f.eval(box.lowers().first(n)) >= box.upper(n);
        // both at once would need f(upper) <= x* and f(lower) >= x* + 2^-k
        // with f nondecreasing: impossible on a non-degenerate box
        assert(!(lt && gt));
        if (lt)
            return {Verdict::LT, std::move(cuts), std::move(box)};
        if (gt)
            return {Verdict::GT, std::move(cuts), std::move(box)};
        if (cuts.length() >= cut_cap) {
            std::vector<DyadicRational> prefixes;
            prefixes.reserve(box.arity());
            for (std::size_t j = 0; j < box.arity(); ++j)
                prefixes.push_back(box.prefix(j));
            throw CutBudgetExceeded(std::move(cuts), std::move(prefixes), cut_cap);
        }
        std::size_t coord = strategy.next_cut(cuts, box);
        box.reveal(coord);
        cuts.append(coord);
    }
}

DecisionOutcome decide(const MonotoneOracle& f, const Strategy& strategy,
                       std::vector<std::unique_ptr<BitSource>> sources,
                       std::size_t cut_cap) {
    return decide(f, strategy, FeasibleBox(std::move(sources)), cut_cap);
}

CompareOutcome compare_to_constant(const mpq_class& c, BitSource& source,
                                   std::size_t cut_cap) {
    if (c < 0 || c >= 1)
        throw std::invalid_argument("compare_to_constant: constant must lie in [0,1)");
    const mpz_class& q = c.get_den();
    // invariant: lhs = m*q, rhs = p*2^k for prefix m/2^k
    mpz_class lhs = 0;
    mpz_class rhs = c.get_num();
    DyadicRational prefix;
    for (std::uint64_t bits = 0;; ++bits) {
        if (lhs >= rhs)
            return {Side::GREATER, bits}; // X >= m/2^k >= c
        if (lhs + q <= rhs)
            return {Side::LESS, bits}; // X < (m+1)/2^k <= c
        if (bits >= cut_cap) {
            CutString cuts(1);
            for (std::uint64_t i = 0; i < bits; ++i)
                cuts.append(0);
            throw CutBudgetExceeded(std::move(cuts), {prefix}, cut_cap);
        }
        int b = source.next_bit();
        prefix.append_bit(b);
        lhs <<= 1;
        if (b)
            lhs += q;
        rhs <<= 1;
    }
}

SampleOutcome sample(const MonotoneOracle& f, const Strategy& strategy,
                     std::uint64_t sample_seed, std::size_t cut_cap,
                     std::uint64_t attempt_cap) {
    const std::size_t arity = f.arity() + 1;
    std::uint64_t total_bits = 0;
    for (std::uint64_t attempt = 0; attempt < attempt_cap; ++attempt) {
        std::uint64_t attempt_seed = derive_trial_seed(sample_seed, attempt);
        auto outcome = decide(f, strategy, make_pseudo_box(arity, attempt_seed),
                              cut_cap);
        total_bits += outcome.cuts.length();
        if (outcome.verdict == Verdict::GT)
            return {std::move(outcome.box), attempt + 1, total_bits};
    }
    throw AttemptBudgetExceeded(attempt_cap);
}

void refine(FeasibleBox& box, std::size_t coords, unsigned t) {
    if (coords > box.arity())
        throw std::invalid_argument("refine: coordinate count exceeds arity");
    for (std::size_t j = 0; j < coords; ++j)
        if (box.prefix(j).exponent > t)
            throw std::invalid_argument("refine: target below current precision");
    for (std::size_t j = 0; j < coords; ++j)
        while (box.prefix(j).exponent < t)
            box.reveal(j);
}

} // namespace lazybits
