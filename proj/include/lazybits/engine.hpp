#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lazybits/lazybox.hpp"
#include "lazybits/monofn.hpp"

namespace lazybits {

inline constexpr std::size_t kDefaultCutCap = 10000;
inline constexpr std::uint64_t kDefaultAttemptCap = 1000000;

// Picks the next coordinate to reveal. Implementations may look only at
// information already revealed (the cut string and the current prefixes),
// never at the sources.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::size_t next_cut(const CutString& cuts,
                                 const FeasibleBox& box) const = 0;
    virtual std::string name() const = 0;
};

// Round-robin x_1, x_2, ..., x_{n+1}, repeat.
class AltStrategy final : public Strategy {
public:
    std::size_t next_cut(const CutString& cuts, const FeasibleBox&) const override {
        return cuts.length() % cuts.arity();
    }
    std::string name() const override { return "alt"; }
};

// Round-robin starting from the threshold coordinate: x_{n+1}, x_1, ..., x_n.
class ThreshFirstStrategy final : public Strategy {
public:
    std::size_t next_cut(const CutString& cuts, const FeasibleBox&) const override {
        return (cuts.length() + cuts.arity() - 1) % cuts.arity();
    }
    std::string name() const override { return "threshfirst"; }
};

// Two consecutive bits per coordinate per visit.
class TwoBitStrategy final : public Strategy {
public:
    std::size_t next_cut(const CutString& cuts, const FeasibleBox&) const override {
        return (cuts.length() / 2) % cuts.arity();
    }
    std::string name() const override { return "twobit"; }
};

std::unique_ptr<Strategy> make_strategy(const std::string& name);
std::vector<std::string> shipped_strategy_names();

enum class Verdict { LT, GT }; // f(X) < X_{n+1} vs f(X) > X_{n+1}
const char* to_string(Verdict v);

// Halting tests on the current box. Non-strict comparisons: ties against the
// corner values are a measure-zero event, and <= / >= is what lets dyadic
// constants halt at all.
bool can_accept(const MonotoneOracle& f, const FeasibleBox& box);
bool can_reject(const MonotoneOracle& f, const FeasibleBox& box);
bool crosses(const MonotoneOracle& f, const FeasibleBox& box);

struct DecisionOutcome {
    Verdict verdict;
    CutString cuts;
    FeasibleBox box; // state at halt; reveal further for more precision
};

// The revealed state at the moment the budget ran out. Snapshot only, no
// sources, so it stays copyable.
struct CutBudgetExceeded : std::runtime_error {
    CutBudgetExceeded(CutString cuts, std::vector<DyadicRational> prefixes,
                      std::size_t cap);
    CutString cuts;
    std::vector<DyadicRational> prefixes;
    std::size_t cap;
};

struct AttemptBudgetExceeded : std::runtime_error {
    explicit AttemptBudgetExceeded(std::uint64_t cap);
    std::uint64_t cap;
};

// Reveal bits as directed by the strategy until a halting test fires.
// Signals a near-boundary input (never a verdict) via CutBudgetExceeded.
DecisionOutcome decide(const MonotoneOracle& f, const Strategy& strategy,
                       FeasibleBox box, std::size_t cut_cap = kDefaultCutCap);
DecisionOutcome decide(const MonotoneOracle& f, const Strategy& strategy,
                       std::vector<std::unique_ptr<BitSource>> sources,
                       std::size_t cut_cap = kDefaultCutCap);

enum class Side { LESS, GREATER }; // X vs the constant
const char* to_string(Side s);

struct CompareOutcome {
    Side side;
    std::uint64_t bits;
};

// Reveal bits of X until its dyadic interval excludes the constant c:
// entirely above c (GREATER, includes the lower end touching c) or entirely
// at or below it (LESS).
CompareOutcome compare_to_constant(const mpq_class& c, BitSource& source,
                                   std::size_t cut_cap = kDefaultCutCap);

struct SampleOutcome {
    FeasibleBox box; // the accepted attempt's box, all n+1 coordinates
    std::uint64_t attempts = 0;
    std::uint64_t total_bits = 0; // across attempts, decision bits only
};

// Rejection sampling: decide on fresh variates until the point lands under
// the curve (verdict GT). Attempt a of sample_seed uses per-coordinate
// sources seeded derive(derive(sample_seed, a), j).
SampleOutcome sample(const MonotoneOracle& f, const Strategy& strategy,
                     std::uint64_t sample_seed,
                     std::size_t cut_cap = kDefaultCutCap,
                     std::uint64_t attempt_cap = kDefaultAttemptCap);

// Reveal bits of the first `coords` coordinates until each prefix has
// exactly t bits. t must not undercut any current prefix.
void refine(FeasibleBox& box, std::size_t coords, unsigned t);

} // namespace lazybits
