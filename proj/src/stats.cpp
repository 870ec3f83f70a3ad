#include "lazybits/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace lazybits {

double gamma_ln(double x) {
    static const double cof[6] = {76.18009172947146,  -86.50532032941677,
                                  24.01409824083091,  -1.231739572450155,
                                  0.1208650973866179e-2, -0.5395239384953e-5};
    double y = x;
    double tmp = x + 5.5;
    tmp -= (x + 0.5) * std::log(tmp);
    double ser = 1.000000000190015;
    for (double c : cof)
        ser += c / ++y;
    return -tmp + std::log(2.5066282746310005 * ser / x);
}

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 3.0e-12;
constexpr double kFpMin = 1.0e-300;

// series for P(a,x), converges fast for x < a+1
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ++ap;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - gamma_ln(a));
    }
    throw std::runtime_error("gamma_p: series failed to converge");
}

// Lentz continued fraction for Q(a,x), x >= a+1
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin)
            d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin)
            c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return std::exp(-x + a * std::log(x) - gamma_ln(a)) * h;
    }
    throw std::runtime_error("gamma_q: continued fraction failed to converge");
}

} // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0)
        throw std::invalid_argument("gamma_p: need a > 0, x >= 0");
    if (x == 0.0)
        return 0.0;
    if (x < a + 1.0)
        return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0)
        throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
    if (x == 0.0)
        return 1.0;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_sf(double x, unsigned df) {
    if (df == 0)
        throw std::invalid_argument("chi_square_sf: df must be >= 1");
    return gamma_q(0.5 * df, 0.5 * x);
}

} // namespace lazybits
