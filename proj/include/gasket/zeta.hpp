#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gasket {

struct ZetaValue {
  long double value;
  long double error;  // bound on |computed - exact| excluding rounding
};

// Hurwitz zeta sum_{k>=0} (k+q)^(-s) by Euler-Maclaurin with N direct terms
// and Bernoulli corrections up to B_24.
inline ZetaValue hurwitz_zeta_em(long double s, long double q) {
  if (!(s > 1)) throw std::domain_error("zeta needs s > 1");
  if (!(q > 0)) throw std::domain_error("hurwitz zeta needs q > 0");
  static const long double B2j[] = {1.0L / 6,        -1.0L / 30,         1.0L / 42,     -1.0L / 30,
                                    5.0L / 66,       -691.0L / 2730,     7.0L / 6,      -3617.0L / 510,
                                    43867.0L / 798,  -174611.0L / 330,   854513.0L / 138, -236364091.0L / 2730};
  const int N = 24;
  long double sum = 0, comp = 0;
  for (int k = 0; k < N; ++k) {
    long double t = std::pow(q + k, -s);
    long double y = sum + t;
    comp += (sum - y) + t;
    sum = y;
  }
  long double a = q + N;
  long double tail = std::pow(a, 1 - s) / (s - 1) + std::pow(a, -s) / 2;
  // term_j = B_2j/(2j)! * s(s+1)...(s+2j-2) * a^(-s-2j+1)
  long double rising = s;  // s(s+1)...(s+2j-2)
  long double fact = 2;    // (2j)!
  long double apow = std::pow(a, -s - 1);
  long double last = 0;
  for (int j = 1; j <= 12; ++j) {
    long double term = B2j[j - 1] / fact * rising * apow;
    tail += term;
    last = std::fabs(term);
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    fact *= (2 * j + 1) * (2 * j + 2);
    apow /= a * a;
  }
  long double v = sum + comp + tail;
  // The remainder is bounded by the first omitted term, itself below the last kept one.
  return {v, last + 8 * std::numeric_limits<long double>::epsilon() * std::fabs(v)};
}

inline long double hurwitz_zeta(long double s, long double q) { return hurwitz_zeta_em(s, q).value; }
inline long double zeta_special(long double s) { return hurwitz_zeta(s, 1); }

}  // namespace gasket
