#pragma once
// Critical points, periodic orbits, and parameter values where periodic
// orbits are born.

#include <optional>
#include <string>
#include <vector>

#include "chainrec/map_family.hpp"

namespace chainrec {

struct CriticalPoint {
  double x = 0.0;
  int order = 1;  // 1 = simple extremum (d2 != 0), >=2 = degenerate
};

enum class OrbitClass {
  attracting,
  repelling,
  non_hyperbolic_saddle_node,      // multiplier within band of +1
  non_hyperbolic_period_doubling,  // multiplier within band of -1
};

struct PeriodicOrbit {
  std::vector<double> points;  // one cycle, least period, ascending start
  int period = 1;
  double multiplier = 0.0;  // chain-rule product of d1 along the cycle
  OrbitClass cls = OrbitClass::attracting;
  bool tangential = false;  // found as a near-touching root of f^n(x)-x
};

struct OrbitToleances;  // fwd

// Roots of d1 in the domain, |d1| polished to <= 1e-12, sorted ascending.
// A whole subinterval with d1 == 0 raises an error ("flat interval ...").
// The scan grid defaults to 4096 cells; results are stable to 1e-10 under
// grid doubling.
std::vector<CriticalPoint> find_critical_points(const MapFamily& fam,
                                                double lam, int grid = 4096);

// All periodic orbits of least period <= period_max (period_max <= 24).
// Roots of f^n(x) - x are located by a sign-change scan on a grid of 2^14
// cells with Newton polish (bisection fallback); touching roots are picked
// up as local minima of |f^n(x) - x| below tol_orbit and flagged
// non-hyperbolic.  Orbits are deduplicated cyclically.
std::vector<PeriodicOrbit> find_periodic_orbits(const MapFamily& fam,
                                                double lam, int period_max,
                                                double tol_orbit = 1e-9,
                                                double tol_hyp = 1e-4);

// Same search restricted to seeds inside [xlo, xhi] (used for targeted
// existence tests near a known structure; periodic points themselves may
// leave the window, the orbit is kept if any point starts inside).
std::vector<PeriodicOrbit> find_periodic_orbits_in(const MapFamily& fam,
                                                   double lam, int period_max,
                                                   double xlo, double xhi,
                                                   double tol_orbit = 1e-9,
                                                   double tol_hyp = 1e-4);

// Classification helper shared by the orbit finders.
OrbitClass classify_multiplier(double mult, double tol_hyp = 1e-4);

// Bisection in lambda on existence of a least-period-p orbit.  The two
// endpoints must disagree about existence, otherwise the error
// "no birth event bracketed" is raised.  Near the flip the existence test
// switches to the sign of the channel minimum of f^p(x) - x, so the
// returned bracket is reliable down to width 1e-10.
struct SaddleNodeResult {
  double lambda_star = 0.0;   // birth parameter
  double bracket = 0.0;       // final bracket width (<= 1e-10)
  PeriodicOrbit orbit;        // the orbit at (just past) the birth
};
SaddleNodeResult find_saddle_node_parameter(const MapFamily& fam, int period,
                                            double lam_lo, double lam_hi,
                                            double xlo, double xhi);
inline SaddleNodeResult find_saddle_node_parameter(const MapFamily& fam,
                                                   int period, double lam_lo,
                                                   double lam_hi) {
  return find_saddle_node_parameter(fam, period, lam_lo, lam_hi,
                                    fam.domain.lo, fam.domain.hi);
}

// Multiplier of f^period along the cycle through x0 (chain rule).
double cycle_multiplier(const FrozenMap& fm, double x0, int period);

}  // namespace chainrec
