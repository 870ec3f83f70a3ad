#include "lazybits/bitsource.hpp"

namespace lazybits {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ (index * 0x9E3779B97F4A7C15ULL));
}

namespace {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    return mix64(state);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

Xoshiro256StarStar::Xoshiro256StarStar(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_)
        w = splitmix64_next(sm);
}

std::uint64_t Xoshiro256StarStar::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

std::uint64_t Xoshiro256StarStar::next_below(std::uint64_t bound) {
    if (bound == 0)
        throw std::invalid_argument("next_below: bound must be positive");
    if (bound == 1)
        return 0;
    std::uint64_t mask = ~std::uint64_t{0} >> __builtin_clzll(bound - 1);
    for (;;) {
        std::uint64_t v = next() & mask;
        if (v < bound)
            return v;
    }
}

PseudoRandomBitSource::PseudoRandomBitSource(std::uint64_t seed)
    : rng_(seed), seed_(seed) {}

int PseudoRandomBitSource::next_bit() {
    if (avail_ == 0) {
        word_ = rng_.next();
        avail_ = 64;
    }
    --avail_;
    ++position_;
    return static_cast<int>((word_ >> avail_) & 1u);
}

TapeBitSource::TapeBitSource(mpz_class numerator, mpz_class denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)), rem_(num_) {
    if (den_ <= 0)
        throw std::invalid_argument("tape: denominator must be positive");
    if (num_ < 0 || num_ >= den_)
        throw std::invalid_argument("tape: value must lie in [0,1)");
}

int TapeBitSource::next_bit() {
    rem_ <<= 1;
    ++position_;
    if (rem_ >= den_) {
        rem_ -= den_;
        return 1;
    }
    return 0;
}

std::unique_ptr<BitSource> make_pseudo_source(std::uint64_t seed) {
    return std::make_unique<PseudoRandomBitSource>(seed);
}

std::unique_ptr<BitSource> make_tape_source(const mpq_class& value) {
    return std::make_unique<TapeBitSource>(value.get_num(), value.get_den());
}

} // namespace lazybits
