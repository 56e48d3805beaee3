#include "chainrec/explosion_scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace chainrec {

const char* to_string(EventSide s) {
  return s == EventSide::below ? "below" : "above";
}
const char* to_string(EventCause c) {
  switch (c) {
    case EventCause::saddle_node: return "saddle_node";
    case EventCause::tangency_crossing: return "tangency_crossing";
    default: return "unclassified";
  }
}

std::vector<RecurrenceProfile> sweep(const MapFamily& fam,
                                     const std::vector<double>& lambdas,
                                     const ScanResolution& res,
                                     int workers) {
  std::vector<RecurrenceProfile> out(lambdas.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < lambdas.size(); i += stride) {
      RecurrenceProfile& p = out[i];
      p.lam = lambdas[i];
      FrozenMap fm = fam.at(p.lam);
      BoxPartition part(fam.domain.lo, fam.domain.hi, res.n_boxes);
      TransitionGraph g = build_graph(fm, part, res.eps_num);
      p.cover = chain_recurrent_set(g);
      for (int r = 0; r < res.refine_levels; ++r) {
        try {
          p.cover = refine(fam, p.lam, p.cover);
        } catch (const RefineLimitError& e) {
          p.cover = e.partial;
          p.notes.push_back(e.what());
          break;
        }
      }
    }
  };
  if (workers <= 1 || lambdas.size() <= 1) {
    work(0, 1);
  } else {
    const int nw = std::min<std::size_t>(workers, lambdas.size());
    std::vector<std::thread> threads;
    threads.reserve(nw);
    for (int w = 0; w < nw; ++w) threads.emplace_back(work, w, nw);
    for (auto& t : threads) t.join();
  }
  return out;
}

const ChainSetApprox& CoverCache::at(double lam, std::uint32_t n_boxes) {
  auto& vec = levels_[n_boxes];
  for (auto& e : vec) {
    if (e.lam == lam) {
      e.tick = ++tick_;
      return e.cover;
    }
  }
  FrozenMap fm = fam_->at(lam);
  BoxPartition part(fam_->domain.lo, fam_->domain.hi, n_boxes);
  TransitionGraph g = build_graph(fm, part);
  Entry e{lam, ++tick_, chain_recurrent_set(g)};
  if (vec.size() >= cap_) {
    auto victim = std::min_element(vec.begin(), vec.end(),
                                   [](const Entry& a, const Entry& b) {
                                     return a.tick < b.tick;
                                   });
    *victim = std::move(e);
    return victim->cover;
  }
  vec.push_back(std::move(e));
  return vec.back().cover;
}

namespace {

struct Candidate {
  EventSide side = EventSide::below;
  double lam_rec = 0.0;   // profile parameter where the run is recurrent
  double lam_void = 0.0;  // adjacent profile parameter with the delta-void
  std::uint32_t run_lo = 0, run_hi = 0;  // base-level box-id run
  double x = 0.0;                        // run center
  double gap = 0.0;                      // pair spacing
  // filled by bisection stages
  double lam_hat = 0.0;
  double bracket = 0.0;
  bool alive = true;
};

struct Cluster {
  EventSide side = EventSide::below;
  std::vector<std::size_t> members;  // candidate indexes
  std::size_t primary = 0;
};

// Bisect the recurrence boundary of candidate c at resolution n.  lam_r and
// lam_v are updated in place; returns false when the boundary cannot be
// re-bracketed at this resolution (the structure dissolved: noise).
bool bisect_level(CoverCache& cache, Candidate& c, std::uint32_t n,
                  double& lam_r, double& lam_v, double target,
                  const Interval& lam_limits) {
  auto P = [&](double lam) { return cache.at(lam, n).contains_x(c.x); };
  // repair the bracket: recurrence must hold at lam_r and fail at lam_v
  double step = std::max(std::fabs(lam_v - lam_r), 1e-9);
  int tries = 0;
  while (!P(lam_r)) {
    const double dir = lam_r < lam_v ? -1.0 : 1.0;  // away from the void
    lam_r = clamp(lam_r + dir * step, lam_limits.lo, lam_limits.hi);
    step *= 2.0;
    if (++tries > 6) return false;
  }
  step = std::max(std::fabs(lam_v - lam_r), 1e-9);
  tries = 0;
  while (P(lam_v)) {
    const double dir = lam_v < lam_r ? -1.0 : 1.0;
    const double nv = clamp(lam_v + dir * step, lam_limits.lo, lam_limits.hi);
    if (nv == lam_v) return false;
    lam_v = nv;
    step *= 2.0;
    if (++tries > 6) return false;
  }
  while (std::fabs(lam_v - lam_r) > target) {
    const double mid = 0.5 * (lam_r + lam_v);
    if (P(mid)) {
      lam_r = mid;
    } else {
      lam_v = mid;
    }
  }
  c.lam_hat = 0.5 * (lam_r + lam_v);
  c.bracket = std::fabs(lam_v - lam_r);
  return true;
}

}  // namespace

std::vector<ExplosionEvent> detect_explosions(
    const MapFamily& fam, const std::vector<RecurrenceProfile>& profiles,
    const DetectSettings& settings) {
  if (profiles.size() < 3) {
    throw Error("need ≥ 3 profiles");
  }
  for (std::size_t i = 1; i < profiles.size(); ++i) {
    if (!(profiles[i].lam > profiles[i - 1].lam)) {
      throw Error("profiles must be sorted by strictly increasing lambda");
    }
  }

  const BoxPartition base = profiles.front().cover.part;
  const double h_base = base.h();
  const double delta = settings.delta_boxes * h_base;
  const Interval lam_limits{
      std::min(profiles.front().lam, fam.lambda_window.lo),
      std::max(profiles.back().lam, fam.lambda_window.hi)};

  // ---- stage A: base-pair candidates -------------------------------------
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i + 1 < profiles.size(); ++i) {
    const auto& A = profiles[i];
    const auto& B = profiles[i + 1];
    const double gap = B.lam - A.lam;
    auto collect = [&](const RecurrenceProfile& rec,
                       const RecurrenceProfile& voi, EventSide side) {
      std::vector<std::uint32_t> ids;
      for (std::uint32_t id : rec.cover.boxes) {
        const double cx = 0.5 * (base.box_lo(id) + base.box_hi(id));
        if (voi.cover.dist_to(cx) > delta) ids.push_back(id);
      }
      std::size_t k = 0;
      while (k < ids.size()) {
        std::size_t j = k;
        while (j + 1 < ids.size() && ids[j + 1] == ids[j] + 1) ++j;
        Candidate c;
        c.side = side;
        c.lam_rec = rec.lam;
        c.lam_void = voi.lam;
        c.run_lo = ids[k];
        c.run_hi = ids[j];
        const std::uint32_t mid_id = ids[(k + j) / 2];
        c.x = 0.5 * (base.box_lo(mid_id) + base.box_hi(mid_id));
        c.gap = gap;
        cands.push_back(c);
        k = j + 1;
      }
    };
    collect(B, A, EventSide::above);  // recurrence persists above
    collect(A, B, EventSide::below);  // recurrence persists below
  }

  CoverCache cache(fam);

  // resolution ladder from 4x the base up to ladder_top
  const std::uint32_t top = std::max<std::uint32_t>(
      settings.ladder_top, base.n);
  std::vector<std::uint32_t> levels;
  for (std::uint64_t n = std::uint64_t(base.n) * 4; n < top; n *= 4) {
    levels.push_back(static_cast<std::uint32_t>(n));
  }
  if (levels.empty() || levels.back() != top) levels.push_back(top);

  // ---- stage A': first-level bisection + continuity pre-filter -----------
  for (auto& c : cands) {
    double lam_r = c.lam_rec, lam_v = c.lam_void;
    if (!bisect_level(cache, c, levels.front(), lam_r, lam_v,
                      std::max(1e-8, c.gap / 4096.0), lam_limits)) {
      c.alive = false;
      continue;
    }
    // the delta-void must already be open a quarter pair-step into the void
    // side; continuously drifting edges and partition noise fail this
    const double dirv = lam_v > lam_r ? 1.0 : -1.0;
    const double lam_probe =
        clamp(c.lam_hat + dirv * c.gap / 4.0, lam_limits.lo, lam_limits.hi);
    if (cache.at(lam_probe, levels.front()).dist_to(c.x) < delta) {
      c.alive = false;
    }
  }

  // ---- stage B: cluster by boundary parameter and side -------------------
  const double radius = std::max(settings.cluster_radius, 1e-3);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].alive) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cands[a].lam_hat < cands[b].lam_hat;
  });
  std::vector<Cluster> clusters;
  for (std::size_t idx : order) {
    bool placed = false;
    for (auto& cl : clusters) {
      if (cl.side != cands[idx].side) continue;
      if (std::fabs(cands[cl.members.front()].lam_hat -
                    cands[idx].lam_hat) <= radius) {
        cl.members.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) {
      Cluster cl;
      cl.side = cands[idx].side;
      cl.members.push_back(idx);
      clusters.push_back(cl);
    }
  }
  for (auto& cl : clusters) {
    std::uint32_t best_w = 0;
    for (std::size_t m : cl.members) {
      const std::uint32_t w = cands[m].run_hi - cands[m].run_lo + 1;
      if (w > best_w) {
        best_w = w;
        cl.primary = m;
      }
    }
  }

  // ---- stage C: ladder the primaries, attach evidence --------------------
  std::vector<ExplosionEvent> events;
  for (const auto& cl : clusters) {
    Candidate prim = cands[cl.primary];
    double lam_r = prim.lam_rec, lam_v = prim.lam_void;
    bool ok = true;
    for (std::size_t li = 0; li < levels.size() && ok; ++li) {
      const double target = (li + 1 == levels.size())
                                ? 1e-8
                                : std::max(4e-7, 1e-8);
      // re-open the bracket around the previous estimate before each level
      if (li > 0) {
        const double dirv = lam_v > lam_r ? 1.0 : -1.0;
        const double open = std::max(64.0 * prim.bracket, 1e-6);
        lam_r = clamp(prim.lam_hat - dirv * open, lam_limits.lo,
                      lam_limits.hi);
        lam_v = clamp(prim.lam_hat + dirv * open / 8.0, lam_limits.lo,
                      lam_limits.hi);
      }
      ok = bisect_level(cache, prim, levels[li], lam_r, lam_v, target,
                        lam_limits);
    }
    if (!ok) continue;  // dissolved under refinement: suppressed as noise

    // oscillation check around the final boundary: probes on the recurrence
    // side must remain recurrent, probes on the void side must not (one
    // marginal probe is tolerated as box-transition jitter)
    bool limited = false;
    {
      auto check = [&](std::uint32_t n) {
        auto P = [&](double lam) { return cache.at(lam, n).contains_x(prim.x); };
        const double b = std::max(prim.bracket, 1e-9);
        const double dir_rec = lam_r < lam_v ? -1.0 : 1.0;
        int bad = 0;
        for (double k : {2.0, 4.0, 8.0}) {
          if (!P(prim.lam_hat + dir_rec * k * b)) ++bad;
          if (P(prim.lam_hat - dir_rec * k * b)) ++bad;
        }
        return bad <= 1;
      };
      if (!check(levels.back())) {
        // resolution-limited: retry once at a doubled resolution
        const std::uint64_t n2 = std::uint64_t(levels.back()) * 2;
        bool retry_ok = false;
        if (n2 <= (1ull << 24)) {
          double r2 = lam_r, v2 = lam_v;
          const double dirv = lam_v > lam_r ? 1.0 : -1.0;
          r2 = clamp(prim.lam_hat - dirv * 1e-6, lam_limits.lo, lam_limits.hi);
          v2 = clamp(prim.lam_hat + dirv * 1e-6, lam_limits.lo, lam_limits.hi);
          Candidate tmp = prim;
          if (bisect_level(cache, tmp, static_cast<std::uint32_t>(n2), r2, v2,
                           1e-8, lam_limits)) {
            prim = tmp;
            lam_r = r2;
            lam_v = v2;
            retry_ok = check(static_cast<std::uint32_t>(n2));
          }
        }
        limited = !retry_ok;
      }
    }

    ExplosionEvent ev;
    ev.x = prim.x;
    ev.lambda0 = prim.lam_hat;
    ev.bracket = prim.bracket;
    ev.side = cl.side;
    ev.delta = delta;
    ev.resolution_limited = limited;
    for (std::size_t m : cl.members) ev.member_xs.push_back(cands[m].x);
    std::sort(ev.member_xs.begin(), ev.member_xs.end());

    const double dirv = ev.side == EventSide::below ? 1.0 : -1.0;
    auto lam_void_at = [&](double t) {
      return clamp(ev.lambda0 + dirv * t, lam_limits.lo, lam_limits.hi);
    };
    const std::uint32_t n_s = std::min(settings.scaling_level, top);

    // void onset: smallest parameter offset with the delta-void open
    double t_max = std::max(2.0 * prim.gap, 8.0 * settings.cause_window);
    t_max = std::min(t_max, std::fabs(lam_void_at(1e18) - ev.lambda0));
    auto V = [&](double t) {
      return cache.at(lam_void_at(t), n_s).dist_to(ev.x) >= delta;
    };
    double t_v = t_max;
    if (V(t_max)) {
      double tlo = 0.0, thi = t_max;
      while (thi - tlo > std::max(1e-9, 1e-4 * t_max)) {
        const double tm = 0.5 * (tlo + thi);
        (V(tm) ? thi : tlo) = tm;
      }
      t_v = thi;
    } else {
      ev.notes.push_back(
          "delta-void not confirmed at the far probe; onset set to the "
          "probe distance");
    }
    ev.void_onset = t_v;

    // scaling probe distances (used only when no cause evidence is found)
    const double t1 = std::min(1.5 * t_v, t_max);
    const double t2 = std::min(48.0 * t_v, t_max);
    const double d1 = cache.at(lam_void_at(t1), n_s).dist_to(ev.x);
    const double d2 = cache.at(lam_void_at(t2), n_s).dist_to(ev.x);
    const double ratio = d2 / std::max(d1, 1e-300);

    // the void gap around x a little past the onset (containment tests)
    Interval gap_iv{fam.domain.lo, fam.domain.hi};
    {
      const ChainSetApprox& cv =
          cache.at(lam_void_at(std::min(2.0 * t_v, t_max)), n_s);
      const std::uint32_t id = cv.part.locate(ev.x);
      auto it = std::lower_bound(cv.boxes.begin(), cv.boxes.end(), id);
      if (it != cv.boxes.end()) gap_iv.hi = cv.part.box_lo(*it);
      if (it != cv.boxes.begin()) gap_iv.lo = cv.part.box_hi(*(it - 1));
    }

    const double W =
        std::max(settings.cause_window, 4.0 * settings.cluster_radius);
    const double wlo =
        clamp(ev.lambda0 - W, lam_limits.lo, lam_limits.hi);
    const double whi =
        clamp(ev.lambda0 + W, lam_limits.lo, lam_limits.hi);

    // x-window: hull of the member runs plus margin
    double xw_lo = fam.domain.hi, xw_hi = fam.domain.lo;
    for (std::size_t m : cl.members) {
      xw_lo = std::min(xw_lo, base.box_lo(cands[m].run_lo));
      xw_hi = std::max(xw_hi, base.box_hi(cands[m].run_hi));
    }
    xw_lo = std::max(fam.domain.lo, xw_lo - 4.0 * delta);
    xw_hi = std::min(fam.domain.hi, xw_hi + 4.0 * delta);

    // --- saddle-node evidence ---
    std::optional<PeriodicOrbit> sn_orbit;
    double sn_lambda = 0.0;
    {
      // direct test at lambda0: a near-unit multiplier next to the event
      auto orbs0 = find_periodic_orbits_in(fam, ev.lambda0,
                                           settings.period_max, xw_lo, xw_hi,
                                           settings.tol_orbit,
                                           settings.tol_hyp);
      for (const auto& o : orbs0) {
        if (std::fabs(o.multiplier - 1.0) <= settings.tol_sn) {
          sn_orbit = o;
          sn_lambda = ev.lambda0;
          break;
        }
      }
      if (!sn_orbit) {
        // existence flip across the cause window
        auto lo_orbs = find_periodic_orbits_in(fam, wlo, settings.period_max,
                                               xw_lo, xw_hi,
                                               settings.tol_orbit,
                                               settings.tol_hyp);
        auto hi_orbs = find_periodic_orbits_in(fam, whi, settings.period_max,
                                               xw_lo, xw_hi,
                                               settings.tol_orbit,
                                               settings.tol_hyp);
        auto has_p = [](const std::vector<PeriodicOrbit>& v, int p) {
          for (const auto& o : v) {
            if (o.period == p) return true;
          }
          return false;
        };
        for (int p = 1; p <= settings.period_max; ++p) {
          if (has_p(lo_orbs, p) == has_p(hi_orbs, p)) continue;
          try {
            auto res = find_saddle_node_parameter(fam, p, wlo, whi, xw_lo,
                                                  xw_hi);
            if (std::fabs(res.lambda_star - ev.lambda0) <= 2.0 * W) {
              sn_orbit = res.orbit;
              sn_lambda = res.lambda_star;
            }
          } catch (const Error&) {
            // no clean flip for this period
          }
          if (sn_orbit) break;
        }
      }
    }

    // --- tangency evidence ---
    std::optional<HomoclinicRecord> tg_record;
    double tg_lambda = 0.0;
    {
      FrozenMap fm0 = fam.at(ev.lambda0);
      std::vector<CriticalPoint> crits;
      try {
        crits = find_critical_points(fam, ev.lambda0);
      } catch (const Error& e) {
        ev.notes.push_back(std::string("critical-point scan failed: ") +
                           e.what());
      }
      const int cap = std::max(settings.tangency_iterate_cap,
                               3 * settings.period_max);
      const double tol_search = 2e-4;
      struct RawCand {
        double w;
        int k;
        double z;  // periodic point hit
        int p;
      };
      std::vector<RawCand> raw;
      for (const auto& cp : crits) {
        std::vector<double> X(cap + 2 * settings.period_max + 1);
        X[0] = cp.x;
        bool escaped = false;
        for (std::size_t k = 1; k < X.size(); ++k) {
          X[k] = fm0(X[k - 1]);
          if (!std::isfinite(X[k]) || X[k] < fam.domain.lo - 1e-9 ||
              X[k] > fam.domain.hi + 1e-9) {
            escaped = true;
            X.resize(k);
            break;
          }
        }
        if (escaped && X.size() < 4) continue;
        std::vector<std::pair<double, int>> seen;  // dedupe by (cycle, w)
        for (int k = 1;
             k + 2 * settings.period_max < static_cast<int>(X.size());
             ++k) {
          for (int p = 1; p <= settings.period_max; ++p) {
            if (std::fabs(X[k + p] - X[k]) > 1e-4) continue;
            if (std::fabs(X[k + 2 * p] - X[k + p]) > 0.05) continue;
            // polish a genuine period-p point from the shadowed tail
            auto Fp = [&](double z) { return fm0.iterate(z, p) - z; };
            auto dFp = [&](double z) { return fm0.iterate_d1(z, p) - 1.0; };
            double z = newton_polish(Fp, dFp, X[k], fam.domain.lo,
                                     fam.domain.hi, 0.0, 40);
            if (std::fabs(Fp(z)) > 1e-11) continue;
            if (std::fabs(z - X[k]) > tol_search) continue;
            // least period
            bool least = true;
            for (int q = 1; q < p; ++q) {
              if (p % q == 0 &&
                  std::fabs(fm0.iterate(z, q) - z) < 1e-7) {
                least = false;
                break;
              }
            }
            if (!least) continue;
            const double mult = fm0.iterate_d1(z, p);
            if (std::fabs(mult) < 1.05) continue;  // excludes fold orbits
            bool dup = false;
            for (const auto& s : seen) {
              if (std::fabs(s.first - z) < 1e-6 && s.second == p) dup = true;
            }
            if (dup) continue;
            seen.emplace_back(z, p);
            raw.push_back({cp.x, k, z, p});
            break;
          }
          if (raw.size() >= 8) break;
        }
        if (raw.size() >= 8) break;
      }

      for (const auto& rc : raw) {
        if (tg_record) break;
        // polish the tangency parameter: R(lam) = f^k(w(lam)) - x0(lam)
        auto R = [&](double lam) {
          FrozenMap fml = fam.at(lam);
          double wl = rc.w;
          // track the critical point
          wl = newton_polish([&](double t) { return fml.d1(t); },
                             [&](double t) { return fml.d2(t); }, wl,
                             fam.domain.lo, fam.domain.hi, 0.0, 24);
          double zl = newton_polish(
              [&](double t) { return fml.iterate(t, rc.p) - t; },
              [&](double t) { return fml.iterate_d1(t, rc.p) - 1.0; }, rc.z,
              fam.domain.lo, fam.domain.hi, 0.0, 24);
          return fml.iterate(wl, rc.k) - zl;
        };
        double la = ev.lambda0, lb = ev.lambda0 + 0.25 * W * (dirv);
        double fa = R(la), fb = R(lb);
        double lam_t = la;
        bool conv = false;
        for (int it = 0; it < 24; ++it) {
          if (fb == fa) break;
          const double ln = lb - fb * (lb - la) / (fb - fa);
          if (!std::isfinite(ln) || ln < ev.lambda0 - 2 * W ||
              ln > ev.lambda0 + 2 * W) {
            break;
          }
          la = lb;
          fa = fb;
          lb = ln;
          fb = R(ln);
          if (std::fabs(fb) < 1e-10) {
            lam_t = ln;
            conv = true;
            break;
          }
        }
        if (!conv) continue;
        try {
          UnstableBranches br = compute_branches(fam, lam_t, rc.z, rc.p);
          if (std::fabs(br.multiplier) < 1.05) continue;
          FrozenMap fmt = fam.at(lam_t);
          const double wt = newton_polish(
              [&](double t) { return fmt.d1(t); },
              [&](double t) { return fmt.d2(t); }, rc.w, fam.domain.lo,
              fam.domain.hi, 0.0, 24);
          HomoclinicRecord rec;
          rec.family_id = fam.family_id;
          rec.lam = lam_t;
          rec.x0 = br.x0;
          rec.period = rc.p;
          rec.multiplier = br.multiplier;
          rec.derivative_sign = br.derivative_sign;
          rec.w = wt;
          rec.L = rc.k;
          rec.landing_residual = std::fabs(fmt.iterate(wt, rc.k) - br.x0);
          rec.local_side = classify_crossing_side(fmt, wt, rc.k, br.x0);
          build_backward_orbit(fam, lam_t, rec, br);
          rec.crossing = crossing_from(rec.approach_branch, rec.local_side);
          const bool in_l = br.contains(Side::left, wt, 1e-9);
          const bool in_r = br.contains(Side::right, wt, 1e-9);
          if (in_l != in_r) {
            rec.exclusive_branch = in_l ? Side::left : Side::right;
          }

          bool accept = false;
          std::string why;
          if (br.derivative_sign < 0) {
            // merged-branch landing: the event gap must contain a point of
            // the base orbit
            double z = br.x0;
            for (int q = 0; q < rc.p; ++q) {
              if (z > gap_iv.lo && z < gap_iv.hi) accept = true;
              z = fmt(z);
            }
            why = "merged-branch landing (negative multiplier)";
          } else if (rec.exclusive_branch) {
            const Interval hull = br.hull(*rec.exclusive_branch);
            const bool touches =
                !hull.empty() && hull.lo < gap_iv.hi && hull.hi > gap_iv.lo;
            accept = rec.crossing && touches;
            why = "crossing tangency on the exclusive branch";
          } else if (in_l && in_r) {
            auto pred = predict_explosion(fam, lam_t, rec, br);
            if (!pred.exclusive_preimages.empty()) {
              const double z0 = pred.exclusive_preimages.front();
              const Side s_exc = br.contains(Side::left, z0, 1e-9)
                                     ? Side::left
                                     : Side::right;
              bool in_gap = false;
              for (double z : pred.exclusive_preimages) {
                if (z > gap_iv.lo && z < gap_iv.hi) in_gap = true;
              }
              accept = crossing_from(s_exc, rec.local_side) && in_gap;
              why = "crossing tangency carried by exclusive-side preimages";
            }
          }
          if (accept) {
            tg_record = rec;
            tg_lambda = lam_t;
            ev.notes.push_back(why);
          }
        } catch (const BranchError& e) {
          ev.notes.push_back(std::string("tangency candidate dropped: ") +
                             e.what());
        } catch (const Error& e) {
          ev.notes.push_back(std::string("tangency candidate dropped: ") +
                             e.what());
        }
      }
    }

    // --- resolve cause (dual evidence: the closer parameter wins) ---
    if (sn_orbit && tg_record) {
      const double dsn = std::fabs(sn_lambda - ev.lambda0);
      const double dtg = std::fabs(tg_lambda - ev.lambda0);
      std::ostringstream os;
      os << "dual evidence: saddle-node at " << sn_lambda
         << " and tangency at " << tg_lambda << "; kept the closer cause";
      ev.notes.push_back(os.str());
      if (dsn <= dtg) {
        tg_record.reset();
      } else {
        sn_orbit.reset();
      }
    }
    if (sn_orbit) {
      ev.cause = EventCause::saddle_node;
      ev.orbit = sn_orbit;
      ev.orbit_lambda = sn_lambda;
    } else if (tg_record) {
      ev.cause = EventCause::tangency_crossing;
      ev.record = tg_record;
      ev.record_lambda = tg_lambda;
    } else {
      // no structural evidence: keep only genuine jumps (distance plateau)
      if (!(ratio <= 2.5 && d2 >= 2.0 * delta)) {
        continue;  // distances grow with the offset: continuous deformation
      }
      ev.cause = EventCause::unclassified;
      std::ostringstream os;
      os << "distance plateau d(" << t1 << ") = " << d1 << ", d(" << t2
         << ") = " << d2 << " with no cause evidence";
      ev.notes.push_back(os.str());
    }
    if (ev.resolution_limited) {
      ev.cause = EventCause::unclassified;
      ev.notes.push_back(
          "resolution-limited: boundary oscillates at the finest level");
    }

    // --- certificates ---
    {
      bool all_ok = true;
      for (double f : {1.5, 2.0, 4.0}) {
        const double t = std::min(f * t_v, t_max);
        if (!V(t)) all_ok = false;
      }
      if (!all_ok) {
        ev.notes.push_back("void-onset verification incomplete");
      }
      const std::uint64_t n_deep = std::uint64_t(n_s) * 2;
      if (n_deep <= (1ull << 24)) {
        const ChainSetApprox& deep = cache.at(
            lam_void_at(std::min(2.0 * t_v, t_max)),
            static_cast<std::uint32_t>(n_deep));
        if (deep.dist_to(ev.x) < delta) {
          ev.resolution_limited = true;
          ev.cause = EventCause::unclassified;
          ev.notes.push_back(
              "delta-void failed re-verification one refinement deeper");
        } else {
          ev.notes.push_back(
              "delta-void re-verified one refinement deeper");
        }
      }
    }

    events.push_back(std::move(ev));
  }

  std::sort(events.begin(), events.end(),
            [](const ExplosionEvent& a, const ExplosionEvent& b) {
              return a.lambda0 != b.lambda0 ? a.lambda0 < b.lambda0
                                            : a.x < b.x;
            });
  return events;
}

}  // namespace chainrec
