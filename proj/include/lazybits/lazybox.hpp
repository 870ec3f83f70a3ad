#pragma once

#include <cstdint>
#include <gmpxx.h>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lazybits/bitsource.hpp"

namespace lazybits {

// m / 2^k with 0 <= m < 2^k. Not kept in lowest terms: appending a 0 bit
// doubles both mantissa and denominator on purpose, the exponent records how
// many bits have been revealed.
struct DyadicRational {
    mpz_class mantissa{0};
    unsigned exponent = 0;

    void append_bit(int bit) {
        mantissa <<= 1;
        if (bit)
            mantissa += 1;
        ++exponent;
    }

    mpq_class value() const;          // m / 2^k
    mpq_class value_plus_ulp() const; // (m+1) / 2^k

    // Compares by value, so (1,1) == (2,2).
    int compare(const DyadicRational& other) const;
    bool operator==(const DyadicRational& o) const { return compare(o) == 0; }
    bool operator<(const DyadicRational& o) const { return compare(o) < 0; }
};

// Sequence of coordinate indices in reveal order. Stored 0-based; formatted
// 1-based to match the usual "coordinates 1..n+1" convention.
class CutString {
public:
    explicit CutString(std::size_t arity);

    void append(std::size_t coord);
    std::size_t length() const { return cuts_.size(); }
    std::size_t arity() const { return counts_.size(); }
    const std::vector<std::size_t>& cuts() const { return cuts_; }
    const std::vector<std::size_t>& counts() const { return counts_; }
    std::size_t count(std::size_t coord) const { return counts_.at(coord); }

    std::string to_string() const; // "1 2 1"

private:
    std::vector<std::size_t> cuts_;
    std::vector<std::size_t> counts_;
};

// A uniform variate revealed one bit at a time: the prefix pins it to
// [prefix, prefix + 2^-k), the source supplies further bits on demand.
struct LazyUniform {
    DyadicRational prefix;
    std::unique_ptr<BitSource> source;
};

struct BitCapExceeded : std::runtime_error {
    explicit BitCapExceeded(std::size_t coord, unsigned cap);
    std::size_t coord;
    unsigned cap;
};

inline constexpr unsigned kDefaultBitCap = 4096;

// Product of the per-coordinate prefix intervals. Corner coordinates are
// cached as rationals and updated in place per reveal.
class FeasibleBox {
public:
    FeasibleBox(std::vector<std::unique_ptr<BitSource>> sources,
                unsigned bit_cap = kDefaultBitCap);

    std::size_t arity() const { return vars_.size(); }
    unsigned bit_cap() const { return bit_cap_; }

    const DyadicRational& prefix(std::size_t coord) const;
    BitSource& source(std::size_t coord) { return *vars_.at(coord).source; }

    // Closed lower / open upper corner, coordinate by coordinate.
    const mpq_class& lower(std::size_t coord) const { return lower_.at(coord); }
    const mpq_class& upper(std::size_t coord) const { return upper_.at(coord); }
    std::span<const mpq_class> lowers() const { return lower_; }
    std::span<const mpq_class> uppers() const { return upper_; }

    // One more bit of coordinate `coord`. Throws BitCapExceeded at the cap.
    int reveal(std::size_t coord);

    std::uint64_t total_bits() const { return total_bits_; }

private:
    std::vector<LazyUniform> vars_;
    std::vector<mpq_class> lower_;
    std::vector<mpq_class> upper_;
    std::vector<mpz_class> denom_; // 2^k per coordinate
    unsigned bit_cap_;
    std::uint64_t total_bits_ = 0;
};

// Convenience builders.
FeasibleBox make_pseudo_box(std::size_t arity, std::uint64_t trial_seed,
                            unsigned bit_cap = kDefaultBitCap);
FeasibleBox make_tape_box(const std::vector<mpq_class>& tapes,
                          unsigned bit_cap = kDefaultBitCap);

} // namespace lazybits
