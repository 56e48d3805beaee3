#include "chainrec/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chainrec {

namespace {

// Least m dividing n with f^m(x) == x to within tol; returns n if none.
int least_period(const FrozenMap& fm, double x, int n, double tol) {
  for (int m = 1; m < n; ++m) {
    if (n % m != 0) continue;
    if (std::fabs(fm.iterate(x, m) - x) <= tol) return m;
  }
  return n;
}

// Canonical cycle through x: n points sorted start at the minimum.
std::vector<double> cycle_points(const FrozenMap& fm, double x, int n) {
  std::vector<double> pts(n);
  double z = x;
  for (int k = 0; k < n; ++k) {
    pts[k] = z;
    z = fm(z);
  }
  auto mn = std::min_element(pts.begin(), pts.end());
  std::rotate(pts.begin(), mn, pts.end());
  return pts;
}

}  // namespace

OrbitClass classify_multiplier(double mult, double tol_hyp) {
  if (std::fabs(mult - 1.0) <= tol_hyp) {
    return OrbitClass::non_hyperbolic_saddle_node;
  }
  if (std::fabs(mult + 1.0) <= tol_hyp) {
    return OrbitClass::non_hyperbolic_period_doubling;
  }
  return std::fabs(mult) < 1.0 ? OrbitClass::attracting : OrbitClass::repelling;
}

double cycle_multiplier(const FrozenMap& fm, double x0, int period) {
  return fm.iterate_d1(x0, period);
}

std::vector<CriticalPoint> find_critical_points(const MapFamily& fam,
                                                double lam, int grid) {
  if (grid < 4096) grid = 4096;
  FrozenMap fm = fam.at(lam);
  const double a = fam.domain.lo, b = fam.domain.hi;

  // Flat-interval detection: many consecutive cells with d1 ~ 0.
  double scale = 0.0;
  std::vector<double> v(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    v[i] = fm.d1(a + (b - a) * i / grid);
    scale = std::max(scale, std::fabs(v[i]));
  }
  const double flat_tol = std::max(1e-14, 1e-12 * scale);
  int run = 0;
  for (int i = 0; i <= grid; ++i) {
    run = (std::fabs(v[i]) < flat_tol) ? run + 1 : 0;
    if (run >= 32) {
      throw Error("flat interval of critical points detected");
    }
  }

  // The frozen map locates the roots of d1 once at construction (sign-change
  // scan, bisection, and touching-root recovery with acceptance gates scaled
  // to the coefficient magnitude).  Reuse that list so every caller sees the
  // same critical set; the grid pass above only guards the flat-interval
  // error contract.
  const auto& xs = fm.critical_xs();
  const auto& orders = fm.critical_orders();
  std::vector<CriticalPoint> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out[k] = {xs[k], orders[k]};
  }
  return out;
}

namespace {

std::vector<PeriodicOrbit> periodic_scan(const MapFamily& fam, double lam,
                                         int period_max, double xlo,
                                         double xhi, double tol_orbit,
                                         double tol_hyp) {
  if (period_max < 1 || period_max > 24) {
    throw Error("period_max must be between 1 and 24");
  }
  FrozenMap fm = fam.at(lam);
  const int G = 1 << 14;
  std::vector<PeriodicOrbit> out;

  auto known = [&](double x, int n) {
    for (const auto& o : out) {
      if (o.period != n) continue;
      for (double p : o.points) {
        if (std::fabs(p - x) <= std::max(1e-7, 20 * tol_orbit)) return true;
      }
    }
    return false;
  };

  auto accept_root = [&](double x, int n, bool tangential) {
    if (!std::isfinite(x)) return;
    if (least_period(fm, x, n, std::max(1e-7, 20 * tol_orbit)) != n) return;
    if (known(x, n)) return;
    PeriodicOrbit o;
    o.points = cycle_points(fm, x, n);
    o.period = n;
    o.multiplier = cycle_multiplier(fm, o.points[0], n);
    o.cls = classify_multiplier(o.multiplier, tol_hyp);
    o.tangential = tangential;
    if (tangential && o.cls == OrbitClass::attracting) {
      o.cls = OrbitClass::non_hyperbolic_saddle_node;
    }
    if (tangential && o.cls == OrbitClass::repelling) {
      o.cls = std::fabs(o.multiplier - 1.0) < std::fabs(o.multiplier + 1.0)
                  ? OrbitClass::non_hyperbolic_saddle_node
                  : OrbitClass::non_hyperbolic_period_doubling;
    }
    out.push_back(std::move(o));
  };

  std::vector<double> v(G + 1);
  for (int n = 1; n <= period_max; ++n) {
    auto F = [&](double x) { return fm.iterate(x, n) - x; };
    auto dF = [&](double x) { return fm.iterate_d1(x, n) - 1.0; };
    for (int i = 0; i <= G; ++i) {
      const double x = xlo + (xhi - xlo) * i / G;
      v[i] = F(x);
    }
    for (int i = 0; i < G; ++i) {
      const double xl = xlo + (xhi - xlo) * i / G;
      const double xr = xlo + (xhi - xlo) * (i + 1) / G;
      if (!std::isfinite(v[i]) || !std::isfinite(v[i + 1])) continue;
      const bool sl = v[i] < 0.0, sr = v[i + 1] < 0.0;
      if (v[i] == 0.0) {
        accept_root(xl, n, false);
      } else if (sl != sr) {
        double x = bisect_root(F, xl, xr, 1e-14);
        x = newton_polish(F, dF, x, xl - (xhi - xlo) / G, xr + (xhi - xlo) / G,
                          0.0);
        if (std::fabs(F(x)) <= tol_orbit) accept_root(x, n, false);
      } else if (i > 0 && std::isfinite(v[i - 1]) &&
                 std::fabs(v[i]) <= std::fabs(v[i - 1]) &&
                 std::fabs(v[i]) < std::fabs(v[i + 1]) &&
                 std::fabs(v[i]) < 1e-3) {
        // touching-root candidate: polish the extremum of F, then accept
        // only if the polished residual is inside tol_orbit
        double x = newton_polish(
            dF, [&](double t) { return fd_derivative(dF, t, 1e-7); }, xl,
            std::max(xlo, xl - 4 * (xhi - xlo) / G),
            std::min(xhi, xl + 4 * (xhi - xlo) / G), 0.0, 32);
        if (std::fabs(F(x)) <= tol_orbit) accept_root(x, n, true);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
              return a.period != b.period ? a.period < b.period
                                          : a.points[0] < b.points[0];
            });
  return out;
}

}  // namespace

std::vector<PeriodicOrbit> find_periodic_orbits(const MapFamily& fam,
                                                double lam, int period_max,
                                                double tol_orbit,
                                                double tol_hyp) {
  return periodic_scan(fam, lam, period_max, fam.domain.lo, fam.domain.hi,
                       tol_orbit, tol_hyp);
}

std::vector<PeriodicOrbit> find_periodic_orbits_in(const MapFamily& fam,
                                                   double lam, int period_max,
                                                   double xlo, double xhi,
                                                   double tol_orbit,
                                                   double tol_hyp) {
  return periodic_scan(fam, lam, period_max, xlo, xhi, tol_orbit, tol_hyp);
}

SaddleNodeResult find_saddle_node_parameter(const MapFamily& fam, int period,
                                            double lam_lo, double lam_hi,
                                            double xlo, double xhi) {
  auto exists = [&](double lam) -> std::optional<PeriodicOrbit> {
    auto orbs = find_periodic_orbits_in(fam, lam, period, xlo, xhi);
    for (auto& o : orbs) {
      if (o.period == period) return o;
    }
    return std::nullopt;
  };

  auto e_lo = exists(lam_lo);
  auto e_hi = exists(lam_hi);
  if (e_lo.has_value() == e_hi.has_value()) {
    throw Error("no birth event bracketed");
  }
  const bool exist_low = e_lo.has_value();  // orbit lives on the low side?

  // Phase 1: plain bisection on orbit existence down to a 1e-6 bracket.
  double lo = lam_lo, hi = lam_hi;
  PeriodicOrbit last = exist_low ? *e_lo : *e_hi;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    auto e = exists(mid);
    if (e.has_value() == exist_low) {
      lo = mid;
      if (e) last = *e;
    } else {
      hi = mid;
      if (e) last = *e;
    }
  }

  // Phase 2: Newton on the fold system F(x, lam) = 0, dF/dx(x, lam) = 0,
  // started from the nearest orbit point on the existing side.
  double x = last.points[0];
  // choose the orbit point with multiplier contribution closest to tangency
  {
    double best = std::numeric_limits<double>::max();
    FrozenMap fme = fam.at(exist_low ? lo : hi);
    for (double p : last.points) {
      const double m = std::fabs(fme.iterate_d1(p, period) - 1.0);
      if (m < best) {
        best = m;
        x = p;
      }
    }
  }
  double lam = 0.5 * (lo + hi);
  auto F = [&](double xx, double ll) {
    return fam.at(ll).iterate(xx, period) - xx;
  };
  auto Fx = [&](double xx, double ll) {
    return fam.at(ll).iterate_d1(xx, period) - 1.0;
  };
  bool newton_ok = false;
  for (int it = 0; it < 60; ++it) {
    const double f0 = F(x, lam), g0 = Fx(x, lam);
    const double hx = 1e-7, hl = 1e-7;
    const double fx = Fx(x, lam);
    const double fl = (F(x, lam + hl) - F(x, lam - hl)) / (2 * hl);
    const double gx = (Fx(x + hx, lam) - Fx(x - hx, lam)) / (2 * hx);
    const double gl = (Fx(x, lam + hl) - Fx(x, lam - hl)) / (2 * hl);
    const double det = fx * gl - fl * gx;
    if (det == 0.0 || !std::isfinite(det)) break;
    const double dx = (f0 * gl - fl * g0) / det;
    const double dl = (fx * g0 - f0 * gx) / det;
    x -= dx;
    lam -= dl;
    if (std::fabs(dx) < 1e-13 && std::fabs(dl) < 1e-13) {
      newton_ok = std::fabs(F(x, lam)) < 1e-10 && std::fabs(Fx(x, lam)) < 1e-7;
      break;
    }
  }

  SaddleNodeResult res;
  if (newton_ok && lam >= lam_lo - 1e-6 && lam <= lam_hi + 1e-6) {
    res.lambda_star = lam;
    res.bracket = 1e-10;
    FrozenMap fms = fam.at(lam);
    res.orbit.points = cycle_points(fms, x, period);
    res.orbit.period = period;
    res.orbit.multiplier = cycle_multiplier(fms, res.orbit.points[0], period);
    res.orbit.cls = OrbitClass::non_hyperbolic_saddle_node;
    res.orbit.tangential = true;
    return res;
  }

  // Phase 3 fallback: channel-minimum bisection.  Near the fold the orbit
  // pair is a near-double root of F, so existence is decided by the sign of
  // the local extremal value of F around the channel center.
  const double r = std::max(1e-3, 1e-3 * fam.domain.width());
  const double curv =
      (Fx(x + 1e-5, 0.5 * (lo + hi)) - Fx(x - 1e-5, 0.5 * (lo + hi))) / 2e-5;
  const double want = curv >= 0 ? -1.0 : 1.0;  // sign of F at existing fold
  auto channel_exists = [&](double ll) {
    FrozenMap fmc = fam.at(ll);
    double ext = want < 0 ? std::numeric_limits<double>::max()
                          : std::numeric_limits<double>::lowest();
    const int M = 512;
    for (int i = 0; i <= M; ++i) {
      const double xx = x - r + 2 * r * i / M;
      const double fv = fmc.iterate(xx, period) - xx;
      if (!std::isfinite(fv)) continue;
      ext = want < 0 ? std::min(ext, fv) : std::max(ext, fv);
    }
    return want < 0 ? ext <= 0.0 : ext >= 0.0;
  };
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (channel_exists(mid) == exist_low) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  res.lambda_star = 0.5 * (lo + hi);
  res.bracket = hi - lo;
  FrozenMap fms = fam.at(exist_low ? lo : hi);
  // polish the tangent orbit point at the surviving endpoint
  double xs = newton_polish(
      [&](double t) { return fms.iterate_d1(t, period) - 1.0; },
      [&](double t) {
        return fd_derivative(
            [&](double u) { return fms.iterate_d1(u, period) - 1.0; }, t,
            1e-6);
      },
      x, x - r, x + r, 0.0, 40);
  res.orbit.points = cycle_points(fms, xs, period);
  res.orbit.period = period;
  res.orbit.multiplier = cycle_multiplier(fms, xs, period);
  res.orbit.cls = OrbitClass::non_hyperbolic_saddle_node;
  res.orbit.tangential = true;
  return res;
}

}  // namespace chainrec
