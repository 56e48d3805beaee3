#pragma once
// Curated family corpus used by the property and acceptance suites: exact
// polynomial constructions with a designed tangency at lambda = 1, plus the
// logistic band-merge entry CF6.  Coefficients and reference values were
// solved and verified independently ahead of the build; the tables embedded
// here are regenerated from that frozen source.

#include <string>
#include <vector>

#include "chainrec/map_family.hpp"

namespace chainrec {

// (parameter offset from lam0, point, radius, expected recurrence): probes
// of the recurrent covering pinned at corpus freeze time.
struct CorpusProbe {
  double dlam = 0.0;
  double x = 0.0;
  double r = 0.0;
  bool recurrent = false;
};

struct CorpusEntry {
  std::string id;
  std::vector<CoeffRow> rows;  // empty for CF6 (builtin logistic)
  double lam0 = 1.0;           // constructed tangency parameter
  double x0 = 0.0;             // base periodic point at lam0
  double w = 0.0;              // tangency critical point
  double multiplier = 0.0;
  int L = 0;                   // landing steps f^L(w) = x0
  int period = 1;
  double half_window = 0.0;    // parameter half-window of the family
  double dT_dlam = 0.0;        // transversality of the landing in lambda
  double landing_residual = 0.0;
  std::vector<double> forward_chain;   // w, f(w), ..., f^L(w)
  std::vector<double> tail_shared;     // backward tail (shared side)
  std::vector<double> tail_exclusive;  // exclusive-side chain (CF5)
  std::vector<double> crits;           // critical points at lam0
  std::vector<CorpusProbe> probes;
  std::string notes;
};

// CF1, CF2: crossing tangencies; CF3, CF4: non-crossing; CF5:
// branch-intersection (critical point on both branches); CF6: logistic
// band merge (negative multiplier).  DEGEN (order-2 critical point) is
// available via corpus_entry/corpus_family but excluded from corpus_ids().
std::vector<std::string> corpus_ids();

const CorpusEntry& corpus_entry(const std::string& id);
MapFamily corpus_family(const std::string& id);

}  // namespace chainrec
