#pragma once

#include <array>
#include <cstdint>
#include <gmpxx.h>
#include <memory>
#include <stdexcept>
#include <string>

namespace lazybits {

// SplitMix64 finalizer. Also used as the seed-derivation mixer.
std::uint64_t mix64(std::uint64_t z);

// Seed for an independent stream i of a master seed s. mix64 is a bijection,
// so distinct (s, i) pairs with the same s never collide.
std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t index);

class Xoshiro256StarStar {
public:
    // State expanded from the seed with SplitMix64.
    explicit Xoshiro256StarStar(std::uint64_t seed);

    std::uint64_t next();

    // Uniform in [0, bound), bound >= 1. Masked rejection, no modulo bias.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::array<std::uint64_t, 4> s_;
};

// A stream of bits addressed one at a time. position() counts bits consumed.
class BitSource {
public:
    virtual ~BitSource() = default;
    virtual int next_bit() = 0;
    virtual std::uint64_t position() const = 0;
};

// xoshiro256** words emitted MSB-first.
class PseudoRandomBitSource final : public BitSource {
public:
    explicit PseudoRandomBitSource(std::uint64_t seed);

    int next_bit() override;
    std::uint64_t position() const override { return position_; }
    std::uint64_t seed() const { return seed_; }

private:
    Xoshiro256StarStar rng_;
    std::uint64_t seed_;
    std::uint64_t word_ = 0;
    int avail_ = 0;
    std::uint64_t position_ = 0;
};

// Binary expansion of p/q in [0,1), by long division: the bit stream b_1 b_2 ...
// with sum b_i 2^-i <= p/q < sum b_i 2^-i + 2^-k after k bits.
class TapeBitSource final : public BitSource {
public:
    TapeBitSource(mpz_class numerator, mpz_class denominator);

    int next_bit() override;
    std::uint64_t position() const override { return position_; }

    const mpz_class& numerator() const { return num_; }
    const mpz_class& denominator() const { return den_; }

private:
    mpz_class num_;
    mpz_class den_;
    mpz_class rem_;
    std::uint64_t position_ = 0;
};

std::unique_ptr<BitSource> make_pseudo_source(std::uint64_t seed);
std::unique_ptr<BitSource> make_tape_source(const mpq_class& value);

} // namespace lazybits
