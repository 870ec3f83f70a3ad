#pragma once

namespace lazybits {

// Regularized incomplete gamma functions, series + continued-fraction split
// at x = a+1, good to ~1e-10 relative over the chi-square range used here.
double gamma_ln(double x);
double gamma_p(double a, double x); // P(a,x), lower
double gamma_q(double a, double x); // Q(a,x), upper

// Survival function of the chi-square distribution: Q(df/2, x/2).
double chi_square_sf(double x, unsigned df);

} // namespace lazybits
