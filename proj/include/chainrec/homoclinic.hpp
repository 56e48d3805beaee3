#pragma once
// Unstable branches of repelling periodic points, critical-orbit tangency
// records, backward orbits through a critical point, and the prediction of
// whether a tangency creates new chain-recurrent points at the critical
// point itself.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chainrec/orbits.hpp"

namespace chainrec {

enum class Side { left, right };
enum class LocalSide { above, below };
enum class BranchRelation {
  disjoint,
  left_inside_right,
  right_inside_left,
  equal,
};

const char* to_string(Side s);
const char* to_string(LocalSide s);
const char* to_string(BranchRelation r);

// One-sided unions of forward images of a small interval next to a
// repelling periodic point x0, under the period-normalized map f^m (or
// f^(2m) when the multiplier is negative).
struct UnstableBranches {
  double x0 = 0.0;
  int period = 1;
  double multiplier = 0.0;   // of f^m at x0
  int derivative_sign = 1;   // sign of (f^m)'(x0)
  double delta0 = 0.0;       // half-width of the linearization zone
  int depth = 64;            // forward depth used
  std::vector<Interval> U_left, U_right;  // merged disjoint intervals
  BranchRelation relation = BranchRelation::disjoint;

  bool contains(Side s, double x, double tol = 0.0) const;
  Interval hull(Side s) const;  // empty (hi<lo) when the branch is empty
};

class BranchError : public Error {
 public:
  UnstableBranches partial;
  BranchError(std::string msg, UnstableBranches p)
      : Error(std::move(msg)), partial(std::move(p)) {}
};

// Branches of the repelling periodic orbit point x0 (period m).  The seed
// half-width delta0 is the largest dyadic value whose one-sided samples all
// satisfy |f^m(x) - x0| >= (1+rho)|x - x0|.  Growth stops when one more
// depth step moves the union by less than 1e-9 ("branch not stabilized"
// is raised otherwise, carrying the partial result).  A non-repelling x0 is
// a precondition violation.
UnstableBranches compute_branches(const MapFamily& fam, double lam, double x0,
                                  int period, int depth = 64);

// A critical point whose forward orbit lands on a repelling periodic point.
struct HomoclinicRecord {
  std::string family_id;
  double lam = 0.0;
  double x0 = 0.0;        // landing periodic point (polished)
  int period = 1;         // its least period
  double multiplier = 0.0;
  double w = 0.0;         // critical point
  int L = 0;              // first landing index: f^L(w) = x0
  double landing_residual = 0.0;
  Side approach_branch = Side::right;
  LocalSide local_side = LocalSide::above;
  bool crossing = false;
  std::optional<Side> exclusive_branch;  // branch containing w exclusively
  int derivative_sign = 1;
  std::vector<double> backward_tail;  // points past w, converging to x0
};

struct TangencySearch {
  std::vector<HomoclinicRecord> records;
  std::vector<std::string> notes;  // skips, non-repelling landings, etc.
};

// Scan every critical orbit for landings within tol_land of a repelling
// periodic point (periods <= period_max), up to iterate_cap forward steps.
// Landings on non-repelling orbits and escaping critical orbits produce
// notes instead of records.
TangencySearch find_tangencies(const MapFamily& fam, double lam,
                               int period_max, int iterate_cap,
                               double tol_land = 1e-9);

// Side of the graph of f^L near w relative to the level of x0, decided by
// probes at w +- h_probe.  Probes on opposite sides raise
// Error("degenerate tangency").
LocalSide classify_crossing_side(const FrozenMap& fm, double w, int L,
                                 double x0, double h_probe = 3e-4);

// A tangency is crossing exactly when the approach branch and the local
// side oppose: (left, above) or (right, below).
inline bool crossing_from(Side approach, LocalSide side) {
  return (approach == Side::left && side == LocalSide::above) ||
         (approach == Side::right && side == LocalSide::below);
}

// Backward orbit z_0 = x0, ..., z_{-L} = w, extended past w by pulling back
// inside the branches (preimage closest to x0 on the approach side); fixes
// approach_branch and backward_tail on the record.  Raises
// Error("no homoclinic orbit through w") when neither branch admits a tail.
void build_backward_orbit(const MapFamily& fam, double lam,
                          HomoclinicRecord& rec, const UnstableBranches& br,
                          int tail_len = 12);

enum class ExplosionVerdict {
  explosion_at_w,
  no_explosion_at_w,
  explosion_at_preimages_only,
};
const char* to_string(ExplosionVerdict v);

struct ExplosionPrediction {
  ExplosionVerdict verdict = ExplosionVerdict::no_explosion_at_w;
  std::string reason;
  // preimage chains of w: points on an exclusive branch explode, points on
  // both branches do not (populated in the both-branches case)
  std::vector<double> exclusive_preimages;
  std::vector<double> shared_preimages;
  int fanout_bound = 4;  // preimage candidates considered per pullback step
};

// Decision order: negative derivative sign -> no explosion at w; w inside
// both branches -> no explosion at w, with the explosion pushed to the
// exclusive-side preimages; w on one branch only -> explosion at w exactly
// when every located backward orbit is crossing.
ExplosionPrediction predict_explosion(const MapFamily& fam, double lam,
                                      const HomoclinicRecord& rec,
                                      const UnstableBranches& br,
                                      int fanout = 4);

// One JSON object per line: family_id, lambda, x0, period, multiplier, w,
// L, approach_branch, local_side, crossing, exclusive_branch, verdict.
void export_records_jsonl(std::ostream& os,
                          const std::vector<HomoclinicRecord>& records,
                          const std::vector<ExplosionPrediction>& verdicts);

}  // namespace chainrec
