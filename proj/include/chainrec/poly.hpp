#pragma once
// Polynomial evaluation with compensated Horner arithmetic.
//
// Coefficients are stored lowest degree first.  The compensated scheme
// (error-free transformations via fused multiply-add) keeps evaluation
// accurate to ~1 ulp even for families whose coefficients reach 1e9 and
// nearly cancel, which plain Horner cannot do.

#include <cstddef>
#include <vector>

namespace chainrec {

// Compensated Horner evaluation of sum_i c[i] * x^i.
double comp_horner(const double* c, std::size_t n, double x);
inline double comp_horner(const std::vector<double>& c, double x) {
  return comp_horner(c.data(), c.size(), x);
}

// Coefficients of the derivative polynomial.
std::vector<double> poly_derivative(const std::vector<double>& c);

// Derivative coefficients i*c[i] kept as exact hi+lo pairs.  For families
// whose coefficients reach 1e9, the rounding of i*c[i] alone perturbs the
// derivative by ~1e-6 in absolute terms; splitting the products keeps the
// evaluated derivative consistent with the evaluated polynomial to ~1 ulp.
struct SplitCoeffs {
  std::vector<double> hi, lo;
};
SplitCoeffs poly_derivative_exact(const std::vector<double>& c);
double comp_horner(const SplitCoeffs& c, double x);

}  // namespace chainrec
