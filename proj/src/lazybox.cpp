#include "lazybits/lazybox.hpp"

#include <sstream>

namespace lazybits {

namespace {

// q := num / den without reallocating q's limbs when they already fit.
void set_ratio(mpq_class& q, const mpz_class& num, const mpz_class& den) {
    mpz_set(mpq_numref(q.get_mpq_t()), num.get_mpz_t());
    mpz_set(mpq_denref(q.get_mpq_t()), den.get_mpz_t());
    mpq_canonicalize(q.get_mpq_t());
}

} // namespace

mpq_class DyadicRational::value() const {
    mpz_class den = 1;
    den <<= exponent;
    mpq_class q(mantissa, den);
    q.canonicalize();
    return q;
}

mpq_class DyadicRational::value_plus_ulp() const {
    mpz_class den = 1;
    den <<= exponent;
    mpq_class q(mantissa + 1, den);
    q.canonicalize();
    return q;
}

int DyadicRational::compare(const DyadicRational& other) const {
    // m_a / 2^ka vs m_b / 2^kb, cross-multiplied by shifting to a common
    // exponent.
    unsigned k = std::max(exponent, other.exponent);
    mpz_class a = mantissa;
    a <<= (k - exponent);
    mpz_class b = other.mantissa;
    b <<= (k - other.exponent);
    return cmp(a, b);
}

CutString::CutString(std::size_t arity) : counts_(arity, 0) {
    if (arity == 0)
        throw std::invalid_argument("cut string: arity must be positive");
}

void CutString::append(std::size_t coord) {
    if (coord >= counts_.size())
        throw std::out_of_range("cut string: coordinate out of range");
    cuts_.push_back(coord);
    ++counts_[coord];
}

std::string CutString::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < cuts_.size(); ++i) {
        if (i)
            os << ' ';
        os << cuts_[i] + 1;
    }
    return os.str();
}

BitCapExceeded::BitCapExceeded(std::size_t coord_, unsigned cap_)
    : std::runtime_error("bit cap exceeded on coordinate " +
                         std::to_string(coord_ + 1) + " (cap " +
                         std::to_string(cap_) + ")"),
      coord(coord_), cap(cap_) {}

FeasibleBox::FeasibleBox(std::vector<std::unique_ptr<BitSource>> sources,
                         unsigned bit_cap)
    : bit_cap_(bit_cap) {
    if (sources.empty())
        throw std::invalid_argument("feasible box: needs at least one source");
    for (auto& s : sources) {
        if (!s)
            throw std::invalid_argument("feasible box: null source");
        vars_.push_back(LazyUniform{DyadicRational{}, std::move(s)});
    }
    lower_.assign(vars_.size(), mpq_class(0));
    upper_.assign(vars_.size(), mpq_class(1));
    denom_.assign(vars_.size(), mpz_class(1));
}

const DyadicRational& FeasibleBox::prefix(std::size_t coord) const {
    return vars_.at(coord).prefix;
}

int FeasibleBox::reveal(std::size_t coord) {
    auto& var = vars_.at(coord);
    if (var.prefix.exponent >= bit_cap_)
        throw BitCapExceeded(coord, bit_cap_);
    int bit = var.source->next_bit();
    var.prefix.append_bit(bit);
    denom_[coord] <<= 1;
    set_ratio(lower_[coord], var.prefix.mantissa, denom_[coord]);
    mpz_class up = var.prefix.mantissa + 1;
    set_ratio(upper_[coord], up, denom_[coord]);
    ++total_bits_;
    return bit;
}

FeasibleBox make_pseudo_box(std::size_t arity, std::uint64_t trial_seed,
                            unsigned bit_cap) {
    std::vector<std::unique_ptr<BitSource>> sources;
    sources.reserve(arity);
    for (std::size_t j = 0; j < arity; ++j)
        sources.push_back(make_pseudo_source(derive_trial_seed(trial_seed, j)));
    return FeasibleBox(std::move(sources), bit_cap);
}

FeasibleBox make_tape_box(const std::vector<mpq_class>& tapes, unsigned bit_cap) {
    std::vector<std::unique_ptr<BitSource>> sources;
    sources.reserve(tapes.size());
    for (const auto& t : tapes)
        sources.push_back(make_tape_source(t));
    return FeasibleBox(std::move(sources), bit_cap);
}

} // namespace lazybits
