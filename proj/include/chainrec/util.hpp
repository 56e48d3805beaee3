#pragma once
// Small shared utilities: error type, interval helpers, finite-difference
// derivatives, and a deterministic RNG wrapper.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainrec {

// All recoverable failures in the library throw this; the message strings are
// part of the public contract and are matched by callers/tests.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool empty() const { return hi < lo; }
};

inline double clamp(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

inline bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Central finite difference; step scaled to the magnitude of x.
inline double fd_derivative(const std::function<double(double)>& f, double x,
                            double h = 0.0) {
  if (h <= 0.0) h = std::max(1e-7, 1e-7 * std::fabs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Deterministic RNG (fixed seed unless the caller supplies one).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : eng_(seed) {}
  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(eng_);
  }
  std::uint64_t integer(std::uint64_t n) {  // in [0, n)
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(eng_);
  }

 private:
  std::mt19937_64 eng_;
};

// Bisection for a root of g on [a,b] assuming g(a), g(b) have opposite signs.
// Returns the midpoint of the final bracket of width <= xtol.
inline double bisect_root(const std::function<double(double)>& g, double a,
                          double b, double xtol, int max_iter = 200) {
  double ga = g(a);
  if (ga == 0.0) return a;
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if (gm == 0.0) return m;
    if ((ga < 0.0) == (gm < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Newton iteration with clamping to [a,b]; xtol==0 iterates to convergence
// of the update step.  Falls back to the start point if divergent.
inline double newton_polish(const std::function<double(double)>& g,
                            const std::function<double(double)>& dg, double x0,
                            double a, double b, double xtol,
                            int max_iter = 64) {
  double x = x0;
  double best = x0, best_g = std::fabs(g(x0));
  for (int it = 0; it < max_iter; ++it) {
    const double gv = g(x);
    const double dv = dg(x);
    if (std::fabs(gv) < best_g) {
      best = x;
      best_g = std::fabs(gv);
    }
    if (dv == 0.0) break;
    const double step = gv / dv;
    double xn = x - step;
    if (xn < a) xn = a;
    if (xn > b) xn = b;
    if (std::fabs(xn - x) <= xtol) {
      x = xn;
      if (std::fabs(g(x)) < best_g) best = x;
      break;
    }
    x = xn;
  }
  return std::fabs(g(x)) <= best_g ? x : best;
}

}  // namespace chainrec
