#pragma once
// One-parameter families of interval self-maps.
//
// A family is f_lambda : [a,b] -> R with coefficients affine in the
// parameter.  Built-in kinds evaluate in closed form; general polynomial
// kinds evaluate with compensated Horner arithmetic.  Factories validate
// construction: domain invariance (unless the family is explicitly declared
// escaping) and agreement of the analytic x-derivative with a central finite
// difference at random probe points.

#include <memory>
#include <string>
#include <vector>

#include "chainrec/util.hpp"

namespace chainrec {

enum class FamilyKind { logistic, quadratic, cubic, polynomial };

// coeff_i(lambda) = c0 + lambda * c1, lowest degree first.
struct CoeffRow {
  double c0 = 0.0;
  double c1 = 0.0;
};

// View of a family member at one fixed parameter value; coefficient vectors
// are materialized once so hot loops pay no per-call allocation.
class FrozenMap {
 public:
  FrozenMap(FamilyKind kind, double lam, Interval domain,
            const std::vector<CoeffRow>& rows);

  double operator()(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  double lambda() const { return lam_; }
  const Interval& domain() const { return dom_; }

  // Iterates of the map and the chain-rule derivative of the n-th iterate.
  double iterate(double x, int n) const;
  double iterate_d1(double x, int n) const;  // d/dx of f^n at x

  // Roots of d1 inside the domain, each with its multiplicity order
  // (1 = simple extremum, >=2 = flat/degenerate extremum), sorted ascending.
  // Computed from the derivative coefficient polynomial; used both by the
  // critical-point finder and by image enclosures in the box graph.
  const std::vector<double>& critical_xs() const { return crit_xs_; }
  const std::vector<int>& critical_orders() const { return crit_orders_; }

 private:
  FamilyKind kind_;
  double lam_;
  Interval dom_;
  std::vector<double> c_, c1_, c1lo_, c2_;
  std::vector<double> crit_xs_;
  std::vector<int> crit_orders_;
};

struct FamilyOptions {
  // When true, orbits are allowed to leave the domain (the box graph clips at
  // the boundary); the invariance check at construction is skipped.
  bool allow_escape = false;
  // When true, skip the finite-difference derivative self-check (never used
  // by library code; available for pathological user input).
  bool skip_derivative_check = false;
};

class MapFamily {
 public:
  std::string family_id;
  FamilyKind kind = FamilyKind::polynomial;
  Interval domain;
  Interval lambda_window;
  std::vector<CoeffRow> rows;  // polynomial representation (all kinds have one)
  bool escape_allowed = false;

  double eval(double x, double lam) const;
  double d1(double x, double lam) const;
  double d2(double x, double lam) const;
  double dlam(double x, double lam) const;  // derivative in the parameter

  FrozenMap at(double lam) const;
};

// Factories -----------------------------------------------------------------

// lambda*x*(1-x) on [0,1]; requires lambda_window within [0,4].
MapFamily make_logistic(Interval lambda_window);

// x^2 + lambda on a symmetric domain wide enough to contain every fixed
// point over the parameter window.  Orbits may escape for lambda beyond the
// fold at 1/4; the family is therefore constructed as escaping.
MapFamily make_quadratic(Interval lambda_window);

// General cubic with affine-in-lambda coefficients (4 rows, lowest first).
MapFamily make_cubic(const std::vector<CoeffRow>& rows4, Interval domain,
                     Interval lambda_window, FamilyOptions opts = {});

// General polynomial with affine-in-lambda coefficients.
MapFamily make_polynomial(const std::vector<CoeffRow>& rows, Interval domain,
                          Interval lambda_window, std::string family_id,
                          FamilyOptions opts = {});

}  // namespace chainrec
