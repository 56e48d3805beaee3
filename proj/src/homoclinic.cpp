#include "chainrec/homoclinic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace chainrec {

const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }
const char* to_string(LocalSide s) {
  return s == LocalSide::above ? "above" : "below";
}
const char* to_string(BranchRelation r) {
  switch (r) {
    case BranchRelation::disjoint: return "disjoint";
    case BranchRelation::left_inside_right: return "left_inside_right";
    case BranchRelation::right_inside_left: return "right_inside_left";
    default: return "equal";
  }
}
const char* to_string(ExplosionVerdict v) {
  switch (v) {
    case ExplosionVerdict::explosion_at_w: return "explosion_at_w";
    case ExplosionVerdict::no_explosion_at_w: return "no_explosion_at_w";
    default: return "explosion_at_preimages_only";
  }
}

namespace {

// --- interval-union helpers ---

void merge_union(std::vector<Interval>& u, double join_gap = 1e-12) {
  if (u.empty()) return;
  std::sort(u.begin(), u.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  out.push_back(u[0]);
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (u[i].lo <= out.back().hi + join_gap) {
      out.back().hi = std::max(out.back().hi, u[i].hi);
    } else {
      out.push_back(u[i]);
    }
  }
  u.swap(out);
}

double union_length(const std::vector<Interval>& u) {
  double s = 0.0;
  for (const auto& iv : u) s += iv.width();
  return s;
}

bool union_contains(const std::vector<Interval>& u, double x, double tol) {
  for (const auto& iv : u) {
    if (x >= iv.lo - tol && x <= iv.hi + tol) return true;
  }
  return false;
}

// every interval of a covered by b within tol
bool union_subset(const std::vector<Interval>& a,
                  const std::vector<Interval>& b, double tol) {
  for (const auto& iv : a) {
    bool covered = false;
    for (const auto& jv : b) {
      if (iv.lo >= jv.lo - tol && iv.hi <= jv.hi + tol) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

// Outer enclosure of f^m(I), one map application at a time, using box
// endpoints and interior critical values, clipped to the domain.
Interval image_interval(const FrozenMap& fm, Interval I, int m) {
  const Interval dom = fm.domain();
  for (int s = 0; s < m; ++s) {
    double v0 = fm(I.lo), v1 = fm(I.hi);
    double mn = std::min(v0, v1), mx = std::max(v0, v1);
    for (double c : fm.critical_xs()) {
      if (c > I.lo && c < I.hi) {
        const double vc = fm(c);
        mn = std::min(mn, vc);
        mx = std::max(mx, vc);
      }
    }
    I.lo = std::max(mn, dom.lo);
    I.hi = std::min(mx, dom.hi);
    if (I.empty()) return I;  // image left the domain entirely
  }
  return I;
}

// All solutions of f^m(z) = y in the domain (sign-change scan + bisection).
std::vector<double> preimages_of(const FrozenMap& fm, double y, int m) {
  const int G = 1 << 13;
  const Interval dom = fm.domain();
  auto F = [&](double z) { return fm.iterate(z, m) - y; };
  std::vector<double> roots;
  double prev = F(dom.lo);
  double xprev = dom.lo;
  for (int i = 1; i <= G; ++i) {
    const double x = dom.lo + dom.width() * i / G;
    const double v = F(x);
    if (std::isfinite(prev) && std::isfinite(v)) {
      if (prev == 0.0) roots.push_back(xprev);
      if ((prev < 0) != (v < 0)) {
        roots.push_back(bisect_root(F, xprev, x, 1e-15));
      }
    }
    prev = v;
    xprev = x;
  }
  if (prev == 0.0) roots.push_back(dom.hi);
  // polish and dedupe
  for (double& r : roots) {
    r = newton_polish(F, [&](double z) { return fm.iterate_d1(z, m); }, r,
                      dom.lo, dom.hi, 0.0, 32);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [&](double a, double b) {
                            return std::fabs(a - b) < 1e-11 * std::max(
                                1.0, dom.width());
                          }),
              roots.end());
  return roots;
}

}  // namespace

bool UnstableBranches::contains(Side s, double x, double tol) const {
  return union_contains(s == Side::left ? U_left : U_right, x, tol);
}

Interval UnstableBranches::hull(Side s) const {
  const auto& u = s == Side::left ? U_left : U_right;
  if (u.empty()) return {1.0, 0.0};  // empty interval (hi < lo)
  return {u.front().lo, u.back().hi};
}

UnstableBranches compute_branches(const MapFamily& fam, double lam, double x0,
                                  int period, int depth) {
  FrozenMap fm = fam.at(lam);
  const Interval dom = fam.domain;

  UnstableBranches br;
  br.period = period;
  br.depth = depth;

  // polish the periodic point
  auto Gm = [&](double x) { return fm.iterate(x, period) - x; };
  auto dGm = [&](double x) { return fm.iterate_d1(x, period) - 1.0; };
  x0 = newton_polish(Gm, dGm, x0, dom.lo, dom.hi, 0.0, 40);
  br.x0 = x0;
  br.multiplier = fm.iterate_d1(x0, period);

  if (!(std::fabs(br.multiplier) > 1.0)) {
    throw BranchError(
        "unstable branches require a repelling periodic point "
        "(precondition violated)",
        br);
  }
  br.derivative_sign = br.multiplier < 0 ? -1 : 1;
  const int mb = br.derivative_sign < 0 ? 2 * period : period;
  const double mu_b = fm.iterate_d1(x0, mb);

  // linearization zone: largest dyadic half-width whose one-sided samples
  // all expand away from x0 by the factor (1 + rho)
  const double rho = std::min(0.25 * (mu_b - 1.0), 1.0);
  double delta0 = 0.0;
  for (double d = 0.05 * dom.width(); d >= 1e-10; d *= 0.5) {
    bool ok = true;
    for (int side = -1; side <= 1 && ok; side += 2) {
      for (int i = 1; i <= 32 && ok; ++i) {
        const double x = x0 + side * d * i / 32.0;
        if (x < dom.lo || x > dom.hi) continue;
        if (std::fabs(fm.iterate(x, mb) - x0) <
            (1.0 + rho) * std::fabs(x - x0)) {
          ok = false;
        }
      }
    }
    if (ok) {
      delta0 = d;
      break;
    }
  }
  if (delta0 == 0.0) {
    throw BranchError("no linearization zone found around periodic point",
                      br);
  }
  br.delta0 = delta0;

  auto grow = [&](Side side) -> std::vector<Interval> {
    Interval seed = side == Side::left
                        ? Interval{std::max(dom.lo, x0 - delta0), x0}
                        : Interval{x0, std::min(dom.hi, x0 + delta0)};
    std::vector<Interval> u;
    if (seed.width() <= 0.0) return u;  // branch empty within the domain
    u.push_back(seed);
    double prev_len = union_length(u);
    Interval prev_hull{u.front().lo, u.back().hi};
    int used = 0;
    for (int d2 = 1; d2 <= depth + 1; ++d2) {
      std::vector<Interval> next = u;
      for (const auto& iv : u) {
        Interval im = image_interval(fm, iv, mb);
        if (!im.empty()) next.push_back(im);
      }
      merge_union(next);
      const double len = union_length(next);
      const Interval hull{next.front().lo, next.back().hi};
      const double move = std::fabs(len - prev_len) +
                          std::fabs(hull.lo - prev_hull.lo) +
                          std::fabs(hull.hi - prev_hull.hi);
      u.swap(next);
      prev_len = len;
      prev_hull = hull;
      used = d2;
      if (move <= 1e-9 && d2 >= 2) break;
      if (d2 == depth + 1 && move > 1e-9) {
        br.depth = used;
        if (side == Side::left) {
          br.U_left = u;
        } else {
          br.U_right = u;
        }
        throw BranchError("branch not stabilized", br);
      }
    }
    return u;
  };

  br.U_left = grow(Side::left);
  br.U_right = grow(Side::right);

  const double rel_tol = 1e-9 * std::max(1.0, dom.width());
  const bool l_in_r = !br.U_left.empty() &&
                      union_subset(br.U_left, br.U_right, rel_tol);
  const bool r_in_l = !br.U_right.empty() &&
                      union_subset(br.U_right, br.U_left, rel_tol);
  if (l_in_r && r_in_l) {
    br.relation = BranchRelation::equal;
  } else if (l_in_r) {
    br.relation = BranchRelation::left_inside_right;
  } else if (r_in_l) {
    br.relation = BranchRelation::right_inside_left;
  } else {
    br.relation = BranchRelation::disjoint;
  }
  return br;
}

LocalSide classify_crossing_side(const FrozenMap& fm, double w, int L,
                                 double x0, double h_probe) {
  const double vm = fm.iterate(w - h_probe, L) - x0;
  const double vp = fm.iterate(w + h_probe, L) - x0;
  const double floor_tol = 5e-13;
  if (!std::isfinite(vm) || !std::isfinite(vp) ||
      (std::fabs(vm) < floor_tol && std::fabs(vp) < floor_tol)) {
    throw Error("degenerate tangency");
  }
  if ((vm > 0) != (vp > 0)) {
    throw Error("degenerate tangency");
  }
  return vm > 0 ? LocalSide::above : LocalSide::below;
}

void build_backward_orbit(const MapFamily& fam, double lam,
                          HomoclinicRecord& rec, const UnstableBranches& br,
                          int tail_len) {
  FrozenMap fm = fam.at(lam);
  const int mb = rec.derivative_sign < 0 ? 2 * rec.period : rec.period;

  auto try_side = [&](Side s, std::vector<double>& tail) -> bool {
    tail.clear();
    double target = rec.w;
    for (int step = 0; step < tail_len; ++step) {
      auto cands = preimages_of(fm, target, mb);
      double best = std::numeric_limits<double>::quiet_NaN();
      double best_d = std::numeric_limits<double>::max();
      for (double c : cands) {
        if (!br.contains(s, c, 1e-9)) continue;
        const double d = std::fabs(c - rec.x0);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (!std::isfinite(best)) return !tail.empty() && step >= 3;
      tail.push_back(best);
      target = best;
      if (std::fabs(best - rec.x0) <= 1e-12) break;
    }
    // converged tail: final points must approach x0 inside the zone
    if (tail.size() >= 3) {
      const double a = std::fabs(tail[tail.size() - 3] - rec.x0);
      const double b = std::fabs(tail[tail.size() - 2] - rec.x0);
      const double c = std::fabs(tail.back() - rec.x0);
      return c <= b && b <= a && c <= br.delta0 + 1e-12;
    }
    return !tail.empty() && std::fabs(tail.back() - rec.x0) <= br.delta0;
  };

  std::vector<double> tr, tl;
  const bool okr = !br.U_right.empty() && try_side(Side::right, tr);
  const bool okl = !br.U_left.empty() && try_side(Side::left, tl);
  if (!okr && !okl) {
    throw Error("no homoclinic orbit through w");
  }
  if (okr && okl) {
    // both branches admit a tail; take the one entering the zone faster
    const double dr = tr.empty() ? 1e99 : std::fabs(tr[0] - rec.x0);
    const double dl = tl.empty() ? 1e99 : std::fabs(tl[0] - rec.x0);
    if (dr <= dl) {
      rec.approach_branch = Side::right;
      rec.backward_tail = tr;
    } else {
      rec.approach_branch = Side::left;
      rec.backward_tail = tl;
    }
  } else if (okr) {
    rec.approach_branch = Side::right;
    rec.backward_tail = tr;
  } else {
    rec.approach_branch = Side::left;
    rec.backward_tail = tl;
  }
}

TangencySearch find_tangencies(const MapFamily& fam, double lam,
                               int period_max, int iterate_cap,
                               double tol_land) {
  TangencySearch out;
  FrozenMap fm = fam.at(lam);
  const Interval dom = fam.domain;

  auto crits = find_critical_points(fam, lam);
  auto orbits = find_periodic_orbits(fam, lam, period_max);

  struct Pt {
    double x;
    std::size_t orbit;
  };
  std::vector<Pt> pts;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    for (double p : orbits[i].points) pts.push_back({p, i});
  }

  for (const auto& cp : crits) {
    const double w = cp.x;
    double x = w;
    bool done = false;
    for (int k = 1; k <= iterate_cap && !done; ++k) {
      x = fm(x);
      if (!std::isfinite(x) || x < dom.lo - 1e-9 || x > dom.hi + 1e-9) {
        std::ostringstream os;
        os << "critical orbit from w = " << w << " escaped after " << k
           << " steps; skipped";
        out.notes.push_back(os.str());
        done = true;
        break;
      }
      for (const auto& pt : pts) {
        if (std::fabs(x - pt.x) > tol_land) continue;
        const auto& orb = orbits[pt.orbit];
        if (orb.cls != OrbitClass::repelling) {
          std::ostringstream os;
          os << "tangency to non-repelling orbit (period " << orb.period
             << ", multiplier " << orb.multiplier << ") from w = " << w
             << " at L = " << k;
          out.notes.push_back(os.str());
          done = true;
          break;
        }
        HomoclinicRecord rec;
        rec.family_id = fam.family_id;
        rec.lam = lam;
        rec.w = w;
        rec.L = k;
        rec.period = orb.period;
        rec.multiplier = orb.multiplier;
        rec.x0 = pt.x;
        rec.derivative_sign =
            fm.iterate_d1(pt.x, orb.period) < 0 ? -1 : 1;

        UnstableBranches br;
        try {
          br = compute_branches(fam, lam, pt.x, orb.period);
          rec.x0 = br.x0;  // polished in x0
          rec.multiplier = br.multiplier;
          rec.derivative_sign = br.derivative_sign;
          rec.landing_residual = std::fabs(fm.iterate(w, k) - rec.x0);

          rec.local_side = classify_crossing_side(fm, w, k, rec.x0);
          build_backward_orbit(fam, lam, rec, br);
        } catch (const Error& err) {
          // e.g. "degenerate tangency" from an order-2 critical point, or a
          // branch that fails to stabilize; skip this critical orbit with a
          // diagnostic instead of aborting the whole search
          std::ostringstream os;
          os << "tangency at w = " << w << " (L = " << k
             << ") skipped: " << err.what();
          out.notes.push_back(os.str());
          done = true;
          break;
        }
        rec.crossing = crossing_from(rec.approach_branch, rec.local_side);

        const bool in_l = br.contains(Side::left, w, 1e-9);
        const bool in_r = br.contains(Side::right, w, 1e-9);
        if (in_l != in_r) {
          rec.exclusive_branch = in_l ? Side::left : Side::right;
        }

        // secondary image-side check: probes one normalized period deeper
        // must agree with the local side (positive multiplier only)
        if (rec.derivative_sign > 0) {
          const double h2 = 3e-4;
          const int L2 = k + orb.period;
          const double a = fm.iterate(w - h2, L2) - rec.x0;
          const double b = fm.iterate(w + h2, L2) - rec.x0;
          if (std::isfinite(a) && std::isfinite(b) && (a > 0) == (b > 0)) {
            const LocalSide s2 =
                a > 0 ? LocalSide::above : LocalSide::below;
            if (s2 != rec.local_side) {
              std::ostringstream os;
              os << "image-side crossing test disagrees with probe test at "
                    "w = "
                 << w << "; record kept with probe-test side";
              out.notes.push_back(os.str());
            }
          }
        }

        out.records.push_back(std::move(rec));
        done = true;
        break;
      }
    }
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const HomoclinicRecord& a, const HomoclinicRecord& b) {
              return a.w != b.w ? a.w < b.w : a.x0 < b.x0;
            });
  return out;
}

ExplosionPrediction predict_explosion(const MapFamily& fam, double lam,
                                      const HomoclinicRecord& rec,
                                      const UnstableBranches& br,
                                      int fanout) {
  ExplosionPrediction pred;
  pred.fanout_bound = fanout;
  FrozenMap fm = fam.at(lam);
  const int mb = rec.derivative_sign < 0 ? 2 * rec.period : rec.period;

  if (rec.derivative_sign < 0) {
    pred.verdict = ExplosionVerdict::no_explosion_at_w;
    pred.reason =
        "negative multiplier: the two branches merge and the tangency side "
        "alternates, so no one-sided gap opens at w";
    return pred;
  }

  const bool in_l = br.contains(Side::left, rec.w, 1e-9);
  const bool in_r = br.contains(Side::right, rec.w, 1e-9);

  if (in_l && in_r) {
    pred.verdict = ExplosionVerdict::explosion_at_preimages_only;
    pred.reason =
        "critical point lies on both branches; recurrence survives at w and "
        "the explosion moves to preimages on the exclusive side";
    // classify first-level preimages of w by branch membership and follow
    // each chain a few pullback steps (closest-to-x0 rule)
    auto cands = preimages_of(fm, rec.w, mb);
    int used = 0;
    for (double c : cands) {
      if (used >= fanout) break;
      const bool cl = br.contains(Side::left, c, 1e-9);
      const bool cr = br.contains(Side::right, c, 1e-9);
      if (!cl && !cr) continue;
      ++used;
      const bool exclusive = cl != cr;
      std::vector<double>& chain =
          exclusive ? pred.exclusive_preimages : pred.shared_preimages;
      const Side s = cl ? Side::left : Side::right;
      double target = c;
      chain.push_back(c);
      const int extra = exclusive ? 3 : 1;
      for (int step = 0; step < extra; ++step) {
        auto pp = preimages_of(fm, target, mb);
        double best = std::numeric_limits<double>::quiet_NaN();
        double best_d = std::numeric_limits<double>::max();
        for (double z : pp) {
          const bool zl = br.contains(Side::left, z, 1e-9);
          const bool zr = br.contains(Side::right, z, 1e-9);
          const bool cls_match = exclusive ? (zl != zr) : (zl && zr);
          if (!cls_match) continue;
          if (exclusive && !(s == Side::left ? zl : zr)) continue;
          const double d = std::fabs(z - rec.x0);
          if (d < best_d) {
            best_d = d;
            best = z;
          }
        }
        if (!std::isfinite(best)) break;
        chain.push_back(best);
        target = best;
      }
    }
    return pred;
  }

  if (!in_l && !in_r) {
    pred.verdict = ExplosionVerdict::no_explosion_at_w;
    pred.reason = "critical point lies on neither branch";
    return pred;
  }

  // exclusive branch: every located backward orbit shares the approach
  // side, so the verdict follows the crossing flag.
  if (rec.crossing) {
    pred.verdict = ExplosionVerdict::explosion_at_w;
    pred.reason = "all located backward orbits through w are crossing";
  } else {
    pred.verdict = ExplosionVerdict::no_explosion_at_w;
    pred.reason = "a located backward orbit through w is non-crossing";
  }
  return pred;
}

void export_records_jsonl(std::ostream& os,
                          const std::vector<HomoclinicRecord>& records,
                          const std::vector<ExplosionPrediction>& verdicts) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    nlohmann::json j;
    j["family_id"] = r.family_id;
    j["lambda"] = r.lam;
    j["x0"] = r.x0;
    j["period"] = r.period;
    j["multiplier"] = r.multiplier;
    j["w"] = r.w;
    j["L"] = r.L;
    j["approach_branch"] = to_string(r.approach_branch);
    j["local_side"] = to_string(r.local_side);
    j["crossing"] = r.crossing;
    j["exclusive_branch"] =
        r.exclusive_branch ? to_string(*r.exclusive_branch) : "none";
    j["verdict"] = i < verdicts.size() ? to_string(verdicts[i].verdict)
                                       : "unevaluated";
    os << j.dump() << "\n";
  }
}

}  // namespace chainrec
