#include "chainrec/corpus.hpp"

#include <utility>

namespace chainrec {

namespace {

// Logistic band-merge parameter: f^3(1/2) equals the positive fixed point,
// so the two chaotic bands collide there (located by high-precision root
// solving at corpus freeze time).
constexpr double kLambda6 = 3.678573510428322;

std::vector<CorpusEntry> build_entries() {
  std::vector<CorpusEntry> entries;
#include "corpus_tables.inc"
  {
    CorpusEntry ent;
    ent.id = "CF6";
    ent.lam0 = kLambda6;
    ent.x0 = 0.7281554936539618;
    ent.w = 0.5;
    ent.multiplier = -1.678573510428322;  // lam0 * (1 - 2 * x0)
    ent.L = 3;
    ent.period = 1;
    ent.half_window = 0.01;
    ent.dT_dlam = 0.0;  // not frozen for the builtin entry
    ent.landing_residual = 0.0;
    ent.forward_chain = {0.5, 0.9196433776070805, 0.2718445063460384,
                         0.7281554936539618};
    ent.crits = {0.5};
    ent.notes =
        "logistic band merge: negative multiplier, branches merged, "
        "recurrence persists above lam0 and the gap opens below";
    entries.push_back(std::move(ent));
  }
  return entries;
}

const std::vector<CorpusEntry>& entries() {
  static const std::vector<CorpusEntry> kEntries = build_entries();
  return kEntries;
}

}  // namespace

std::vector<std::string> corpus_ids() {
  return {"CF1", "CF2", "CF3", "CF4", "CF5", "CF6"};
}

const CorpusEntry& corpus_entry(const std::string& id) {
  for (const auto& e : entries()) {
    if (e.id == id) return e;
  }
  throw Error("unknown corpus family '" + id + "'");
}

MapFamily corpus_family(const std::string& id) {
  const CorpusEntry& e = corpus_entry(id);
  if (e.id == "CF6") {
    MapFamily fam = make_logistic({3.5, 4.0});
    fam.family_id = "CF6";
    return fam;
  }
  return make_polynomial(e.rows, {0.0, 1.0},
                         {e.lam0 - e.half_window, e.lam0 + e.half_window},
                         e.id);
}

}  // namespace chainrec
