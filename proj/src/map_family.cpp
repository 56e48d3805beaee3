#include "chainrec/map_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chainrec/poly.hpp"

namespace chainrec {

namespace {

std::vector<double> materialize(const std::vector<CoeffRow>& rows, double lam) {
  std::vector<double> c(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    c[i] = std::fma(lam, rows[i].c1, rows[i].c0);
  }
  return c;
}

double plain_horner(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
  return s;
}

// Magnitude scale of a coefficient vector, used for near-zero tests.
double coeff_scale(const std::vector<double>& c) {
  double m = 0.0;
  for (double v : c) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

FrozenMap::FrozenMap(FamilyKind kind, double lam, Interval domain,
                     const std::vector<CoeffRow>& rows)
    : kind_(kind), lam_(lam), dom_(domain) {
  c_ = materialize(rows, lam);
  SplitCoeffs s1 = poly_derivative_exact(c_);
  c1_ = std::move(s1.hi);
  c1lo_ = std::move(s1.lo);
  c2_ = poly_derivative(c1_);

  // Locate the roots of d1 in the domain: sign-change scan on a fixed grid,
  // then bisection; touching roots (no sign change) are caught as local
  // minima of |d1| and polished with Newton on d2.
  const int G = 4096;
  const double a = dom_.lo, b = dom_.hi;
  const double scale = std::max(1.0, coeff_scale(c1_));
  if (coeff_scale(c1_) <= 1e-14 * std::max(1.0, coeff_scale(c_))) {
    return;  // derivative identically ~0; no isolated critical points
  }
  std::vector<double> v(G + 1);
  for (int i = 0; i <= G; ++i) {
    v[i] = comp_horner(c1_, a + (b - a) * i / G);
  }
  auto push_root = [&](double x) {
    for (double e : crit_xs_) {
      if (std::fabs(e - x) < 1e-9 * std::max(1.0, b - a)) return;
    }
    crit_xs_.push_back(x);
  };
  for (int i = 0; i < G; ++i) {
    const double xl = a + (b - a) * i / G, xr = a + (b - a) * (i + 1) / G;
    if (v[i] == 0.0) push_root(xl);
    if ((v[i] < 0.0 && v[i + 1] > 0.0) || (v[i] > 0.0 && v[i + 1] < 0.0)) {
      double x = bisect_root([&](double t) { return comp_horner(c1_, t); }, xl,
                             xr, 1e-15 * std::max(1.0, b - a));
      x = newton_polish([&](double t) { return comp_horner(c1_, t); },
                        [&](double t) { return comp_horner(c2_, t); }, x, xl,
                        xr, 0.0);
      push_root(x);
    } else if (i > 0 && std::fabs(v[i]) < std::fabs(v[i - 1]) &&
               std::fabs(v[i]) <= std::fabs(v[i + 1]) &&
               std::fabs(v[i]) < 1e-4 * scale) {
      // candidate touching root: polish the extremum of d1 via d2
      double x = a + (b - a) * i / G;
      if (std::fabs(comp_horner(c2_, x)) > 0.0) {
        const double xl2 = std::max(a, x - 2.0 * (b - a) / G);
        const double xr2 = std::min(b, x + 2.0 * (b - a) / G);
        const double gl = comp_horner(c2_, xl2), gr = comp_horner(c2_, xr2);
        if ((gl < 0) != (gr < 0)) {
          x = bisect_root([&](double t) { return comp_horner(c2_, t); }, xl2,
                          xr2, 1e-15 * std::max(1.0, b - a));
        }
      }
      if (std::fabs(comp_horner(c1_, x)) < 1e-10 * scale) push_root(x);
    }
  }
  if (v[0] == 0.0) push_root(a);
  if (v[G] == 0.0) push_root(b);
  std::sort(crit_xs_.begin(), crit_xs_.end());
  crit_orders_.resize(crit_xs_.size());
  for (std::size_t k = 0; k < crit_xs_.size(); ++k) {
    const double x = crit_xs_[k];
    const double d2v = comp_horner(c2_, x);
    // order 1 when d2 is clearly nonzero at the root of d1
    crit_orders_[k] = (std::fabs(d2v) > 1e-6 * scale) ? 1 : 2;
  }
}

double FrozenMap::operator()(double x) const {
  switch (kind_) {
    case FamilyKind::logistic:
      return lam_ * x * (1.0 - x);
    case FamilyKind::quadratic:
      return x * x + lam_;
    default:
      return comp_horner(c_, x);
  }
}

double FrozenMap::d1(double x) const {
  switch (kind_) {
    case FamilyKind::logistic:
      return lam_ * (1.0 - 2.0 * x);
    case FamilyKind::quadratic:
      return 2.0 * x;
    default:
      // hi + lo keeps the i*c_i products error-free; with coefficients of
      // magnitude ~1e9 the rounded products alone would shift d1 by ~1e-6.
      return comp_horner(c1_, x) + comp_horner(c1lo_, x);
  }
}

double FrozenMap::d2(double x) const {
  switch (kind_) {
    case FamilyKind::logistic:
      return -2.0 * lam_;
    case FamilyKind::quadratic:
      return 2.0;
    default:
      return comp_horner(c2_, x);
  }
}

double FrozenMap::iterate(double x, int n) const {
  for (int k = 0; k < n; ++k) {
    x = (*this)(x);
    if (!std::isfinite(x)) return x;
  }
  return x;
}

double FrozenMap::iterate_d1(double x, int n) const {
  double acc = 1.0;
  for (int k = 0; k < n; ++k) {
    acc *= d1(x);
    x = (*this)(x);
    if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  }
  return acc;
}

double MapFamily::eval(double x, double lam) const {
  switch (kind) {
    case FamilyKind::logistic:
      return lam * x * (1.0 - x);
    case FamilyKind::quadratic:
      return x * x + lam;
    default:
      return comp_horner(materialize(rows, lam), x);
  }
}

double MapFamily::d1(double x, double lam) const {
  switch (kind) {
    case FamilyKind::logistic:
      return lam * (1.0 - 2.0 * x);
    case FamilyKind::quadratic:
      return 2.0 * x;
    default:
      return comp_horner(poly_derivative_exact(materialize(rows, lam)), x);
  }
}

double MapFamily::d2(double x, double lam) const {
  switch (kind) {
    case FamilyKind::logistic:
      return -2.0 * lam;
    case FamilyKind::quadratic:
      return 2.0;
    default:
      return comp_horner(
          poly_derivative(poly_derivative(materialize(rows, lam))), x);
  }
}

double MapFamily::dlam(double x, double lam) const {
  (void)lam;
  switch (kind) {
    case FamilyKind::logistic:
      return x * (1.0 - x);
    case FamilyKind::quadratic:
      return 1.0;
    default: {
      std::vector<double> c(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) c[i] = rows[i].c1;
      return comp_horner(c, x);
    }
  }
}

FrozenMap MapFamily::at(double lam) const {
  return FrozenMap(kind, lam, domain, rows);
}

namespace {

void check_invariance(const MapFamily& fam) {
  const int NL = 33;
  const double slack = 1e-9 * std::max(1.0, fam.domain.width());
  for (int j = 0; j <= NL; ++j) {
    const double lam = fam.lambda_window.lo +
                       fam.lambda_window.width() * j / NL;
    FrozenMap fm = fam.at(lam);
    std::vector<double> cand = {fam.domain.lo, fam.domain.hi};
    for (double c : fm.critical_xs()) cand.push_back(c);
    // plus a coarse sample as a safety net for imperfect extremum capture
    for (int i = 0; i <= 256; ++i) {
      cand.push_back(fam.domain.lo + fam.domain.width() * i / 256);
    }
    for (double x : cand) {
      const double y = fm(x);
      if (y < fam.domain.lo - slack || y > fam.domain.hi + slack) {
        std::ostringstream os;
        os << "domain invariance violated for family '" << fam.family_id
           << "': f(" << x << ") = " << y << " at lambda = " << lam
           << " leaves [" << fam.domain.lo << ", " << fam.domain.hi << "]";
        throw Error(os.str());
      }
    }
  }
}

void check_derivative(const MapFamily& fam) {
  Rng rng(0xC0FFEEull);
  for (int k = 0; k < 64; ++k) {
    const double x = rng.uniform(fam.domain.lo, fam.domain.hi);
    const double lam =
        rng.uniform(fam.lambda_window.lo, fam.lambda_window.hi);
    // Richardson-extrapolated central difference: the h^2 truncation term
    // cancels, leaving O(h^4) error.  A single central difference cannot
    // reach 1e-6 relative agreement on high-degree families whose
    // coefficients are large (f''' ~ 1e12 forces truncation above the
    // tolerance at any workable h).
    const double h = 1e-5 * std::max(1.0, std::fabs(x));
    auto cd = [&](double hh) {
      return (fam.eval(x + hh, lam) - fam.eval(x - hh, lam)) / (2 * hh);
    };
    const double fd = (4.0 * cd(0.5 * h) - cd(h)) / 3.0;
    const double an = fam.d1(x, lam);
    const double denom = std::max(1.0, std::fabs(an));
    if (std::fabs(fd - an) / denom > 1e-6) {
      std::ostringstream os;
      os << "derivative check failed for family '" << fam.family_id
         << "' at x = " << x << ", lambda = " << lam << ": analytic " << an
         << " vs finite difference " << fd;
      throw Error(os.str());
    }
  }
}

void validate(MapFamily& fam, const FamilyOptions& opts) {
  fam.escape_allowed = opts.allow_escape;
  if (!opts.allow_escape) check_invariance(fam);
  if (!opts.skip_derivative_check) check_derivative(fam);
}

}  // namespace

MapFamily make_logistic(Interval lambda_window) {
  if (lambda_window.lo < 0.0 || lambda_window.hi > 4.0 ||
      lambda_window.empty()) {
    throw Error("logistic parameter window must lie within [0, 4]");
  }
  MapFamily fam;
  fam.family_id = "logistic";
  fam.kind = FamilyKind::logistic;
  fam.domain = {0.0, 1.0};
  fam.lambda_window = lambda_window;
  fam.rows = {{0.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};  // lambda*x - lambda*x^2
  FamilyOptions opts;
  validate(fam, opts);
  return fam;
}

MapFamily make_quadratic(Interval lambda_window) {
  if (lambda_window.empty()) throw Error("empty parameter window");
  MapFamily fam;
  fam.family_id = "quadratic";
  fam.kind = FamilyKind::quadratic;
  // Domain wide enough to contain every fixed point across the window; the
  // family escapes for lambda beyond the fold at 1/4, so it is constructed
  // as escaping and the box graph clips at the boundary.
  const double lmin = std::min(lambda_window.lo, 0.25);
  const double ext = (1.0 + std::sqrt(1.0 - 4.0 * lmin)) / 2.0;
  const double b = std::max(1.0, ext) + 0.1;
  fam.domain = {-b, b};
  fam.lambda_window = lambda_window;
  fam.rows = {{0.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}};  // lambda + x^2
  FamilyOptions opts;
  opts.allow_escape = true;
  validate(fam, opts);
  return fam;
}

MapFamily make_cubic(const std::vector<CoeffRow>& rows4, Interval domain,
                     Interval lambda_window, FamilyOptions opts) {
  if (rows4.size() != 4) throw Error("cubic family requires 4 coefficient rows");
  MapFamily fam;
  fam.family_id = "cubic";
  fam.kind = FamilyKind::cubic;
  fam.domain = domain;
  fam.lambda_window = lambda_window;
  fam.rows = rows4;
  validate(fam, opts);
  return fam;
}

MapFamily make_polynomial(const std::vector<CoeffRow>& rows, Interval domain,
                          Interval lambda_window, std::string family_id,
                          FamilyOptions opts) {
  if (rows.size() < 2) throw Error("polynomial family requires degree >= 1");
  MapFamily fam;
  fam.family_id = std::move(family_id);
  fam.kind = FamilyKind::polynomial;
  fam.domain = domain;
  fam.lambda_window = lambda_window;
  fam.rows = rows;
  validate(fam, opts);
  return fam;
}

}  // namespace chainrec
