#pragma once

namespace ftm {

// Hurwitz zeta: sum_{k>=0} (k + q)^{-s}, for s > 1 and q > 0.
double hurwitz_zeta(double s, double q);

inline double riemann_zeta(double s) { return hurwitz_zeta(s, 1.0); }

}  // namespace ftm
