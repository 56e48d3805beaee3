#include "chainrec/poly.hpp"

#include <cmath>

namespace chainrec {

namespace {

// Error-free product: a*b = p + e exactly.
inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

// Error-free sum: a+b = s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double z = s - a;
  e = (a - (s - z)) + (b - z);
}

}  // namespace

double comp_horner(const double* c, std::size_t n, double x) {
  if (n == 0) return 0.0;
  double s = c[n - 1];
  double comp = 0.0;
  for (std::size_t k = n - 1; k-- > 0;) {
    double p, ep, es;
    two_prod(s, x, p, ep);
    two_sum(p, c[k], s, es);
    comp = comp * x + (ep + es);
  }
  return s + comp;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  if (c.size() <= 1) {
    d.push_back(0.0);
    return d;
  }
  d.reserve(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) {
    d.push_back(static_cast<double>(i) * c[i]);
  }
  return d;
}

SplitCoeffs poly_derivative_exact(const std::vector<double>& c) {
  SplitCoeffs d;
  if (c.size() <= 1) {
    d.hi.push_back(0.0);
    d.lo.push_back(0.0);
    return d;
  }
  d.hi.reserve(c.size() - 1);
  d.lo.reserve(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) {
    double p, e;
    two_prod(static_cast<double>(i), c[i], p, e);
    d.hi.push_back(p);
    d.lo.push_back(e);
  }
  return d;
}

double comp_horner(const SplitCoeffs& c, double x) {
  return comp_horner(c.hi.data(), c.hi.size(), x) +
         comp_horner(c.lo.data(), c.lo.size(), x);
}

}  // namespace chainrec
