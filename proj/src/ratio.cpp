#include "lazybits/ratio.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace lazybits {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

mpq_class parse_decimal(const std::string& text) {
    // [sign] digits [. digits] [e|E [sign] digits]
    std::string s = text;
    bool neg = false;
    std::size_t pos = 0;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        neg = s[pos] == '-';
        ++pos;
    }
    long exp10 = 0;
    auto epos = s.find_first_of("eE", pos);
    if (epos != std::string::npos) {
        exp10 = std::stol(s.substr(epos + 1));
        s = s.substr(0, epos);
    }
    std::string intpart, fracpart;
    auto dot = s.find('.', pos);
    if (dot == std::string::npos) {
        intpart = s.substr(pos);
    } else {
        intpart = s.substr(pos, dot - pos);
        fracpart = s.substr(dot + 1);
    }
    if (intpart.empty() && fracpart.empty())
        throw std::invalid_argument("not a number: '" + text + "'");
    if ((!intpart.empty() && !all_digits(intpart)) ||
        (!fracpart.empty() && !all_digits(fracpart)))
        throw std::invalid_argument("not a number: '" + text + "'");

    mpz_class mant(intpart.empty() ? "0" : intpart);
    for (char c : fracpart) {
        mant *= 10;
        mant += c - '0';
    }
    exp10 -= static_cast<long>(fracpart.size());

    mpq_class q(mant);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    if (exp10 < 0)
        q /= mpq_class(p10);
    else
        q *= mpq_class(p10);
    q.canonicalize();
    if (neg)
        q = -q;
    return q;
}

} // namespace

mpq_class parse_ratio(const std::string& text) {
    if (text.empty())
        throw std::invalid_argument("empty rational");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string num = text.substr(0, slash);
        std::string den = text.substr(slash + 1);
        if (num.empty() || den.empty())
            throw std::invalid_argument("malformed fraction: '" + text + "'");
        mpq_class p = parse_decimal(num);
        mpq_class q = parse_decimal(den);
        if (q == 0)
            throw std::invalid_argument("zero denominator: '" + text + "'");
        mpq_class r = p / q;
        r.canonicalize();
        return r;
    }
    return parse_decimal(text);
}

std::string format_decimal(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

std::string format_decimal(const mpq_class& value, int digits) {
    // Integers print exactly; everything else goes through double, which is
    // plenty for 12 significant digits of display.
    if (value.get_den() == 1)
        return value.get_num().get_str();
    return format_decimal(value.get_d(), digits);
}

} // namespace lazybits
