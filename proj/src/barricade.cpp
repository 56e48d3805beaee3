#include "chainrec/barricade.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace chainrec {

namespace {

// Outer enclosure of the image of [lo, hi]: endpoint values plus interior
// critical values, clipped to the domain.  Returns false when the image
// lies entirely outside the domain (the material escapes).
bool image_box(const FrozenMap& fm, const Interval& domain, double lo,
               double hi, double& out_lo, double& out_hi) {
  double vlo = fm(lo), vhi = fm(hi);
  if (vlo > vhi) std::swap(vlo, vhi);
  for (double c : fm.critical_xs()) {
    if (c > lo && c < hi) {
      const double v = fm(c);
      vlo = std::min(vlo, v);
      vhi = std::max(vhi, v);
    }
  }
  if (vhi < domain.lo || vlo > domain.hi) return false;
  out_lo = std::max(vlo, domain.lo);
  out_hi = std::min(vhi, domain.hi);
  return true;
}

std::uint64_t hash_set(const std::vector<std::uint32_t>& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint32_t v : s) {
    h ^= v;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::uint32_t> set_difference(
    const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

// Sorted box covering of [lo, hi] clipped to the partition.
std::vector<std::uint32_t> interval_cover(const BoxPartition& part, double lo,
                                          double hi) {
  std::vector<std::uint32_t> ids;
  lo = clamp(lo, part.lo, part.hi);
  hi = clamp(hi, part.lo, part.hi);
  const std::uint32_t a = part.locate(lo), b = part.locate(hi);
  ids.reserve(b - a + 1);
  for (std::uint32_t i = a; i <= b; ++i) ids.push_back(i);
  return ids;
}

// Box tails of sampled orbits started across [lo, hi]: each sample runs
// through a transient of iterate_cap steps, then the boxes visited by the
// next iterate_cap steps are collected.  Samples whose orbit leaves the
// domain contribute nothing; if every sample escapes, throws with an empty
// partial covering.
std::vector<std::uint32_t> sampled_tail_cover(const FrozenMap& fm,
                                              const BoxPartition& part,
                                              double lo, double hi,
                                              int iterate_cap) {
  const Interval domain{part.lo, part.hi};
  const double slack = 1e-12 * std::max(1.0, domain.width());
  const int m = 33;
  lo = clamp(lo, domain.lo, domain.hi);
  hi = clamp(hi, domain.lo, domain.hi);
  std::vector<std::uint32_t> boxes;
  for (int i = 0; i < m; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / (m - 1);
    bool escaped = false;
    for (int k = 0; k < iterate_cap; ++k) {
      x = fm(x);
      if (!std::isfinite(x) || x < domain.lo - slack || x > domain.hi + slack) {
        escaped = true;
        break;
      }
      x = clamp(x, domain.lo, domain.hi);
    }
    if (escaped) continue;
    std::vector<std::uint32_t> tail;
    tail.reserve(iterate_cap);
    for (int k = 0; k < iterate_cap; ++k) {
      tail.push_back(part.locate(x));
      x = fm(x);
      if (!std::isfinite(x) || x < domain.lo - slack || x > domain.hi + slack) {
        escaped = true;
        break;
      }
      x = clamp(x, domain.lo, domain.hi);
    }
    if (!escaped) boxes.insert(boxes.end(), tail.begin(), tail.end());
  }
  std::sort(boxes.begin(), boxes.end());
  boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());
  if (boxes.empty()) {
    OmegaCover partial;
    partial.part = part;
    throw OmegaLimitError("orbit covering escaped the domain", partial);
  }
  return boxes;
}

// Evolves the part of a candidate ball lying outside the source covering.
// Each step takes box images and then removes boxes of the source, so the
// limit retains only material that never funnels back through the source.
// Returns the union over the detected cycle of the set sequence (empty when
// everything is absorbed or escapes); a sequence that fails to cycle within
// the cap yields the union of its last 32 coverings.
std::vector<std::uint32_t> evolve_outside(const FrozenMap& fm,
                                          const BoxPartition& part,
                                          std::vector<std::uint32_t> cur,
                                          const std::vector<std::uint32_t>& src,
                                          int cap) {
  const Interval domain{part.lo, part.hi};
  cur = set_difference(cur, src);
  std::vector<std::vector<std::uint32_t>> history;
  std::unordered_map<std::uint64_t, std::vector<int>> seen;
  for (int step = 0; step <= cap; ++step) {
    if (cur.empty()) return {};
    const std::uint64_t h = hash_set(cur);
    auto it = seen.find(h);
    if (it != seen.end()) {
      for (int j : it->second) {
        if (history[j] == cur) {
          std::vector<std::uint32_t> uni;
          for (int k = j; k < step; ++k) {
            std::vector<std::uint32_t> merged;
            std::set_union(uni.begin(), uni.end(), history[k].begin(),
                           history[k].end(), std::back_inserter(merged));
            uni = std::move(merged);
          }
          return uni;
        }
      }
    }
    seen[h].push_back(static_cast<int>(history.size()));
    history.push_back(cur);
    std::vector<std::uint32_t> next;
    for (std::uint32_t id : cur) {
      double lo, hi;
      if (!image_box(fm, domain, part.box_lo(id), part.box_hi(id), lo, hi)) {
        continue;
      }
      const std::uint32_t a = part.locate(lo), b = part.locate(hi);
      for (std::uint32_t i = a; i <= b; ++i) next.push_back(i);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cur = set_difference(next, src);
  }
  std::vector<std::uint32_t> uni;
  const int tail = std::max<int>(1, std::min<int>(32, history.size()));
  for (int k = static_cast<int>(history.size()) - tail;
       k < static_cast<int>(history.size()); ++k) {
    std::vector<std::uint32_t> merged;
    std::set_union(uni.begin(), uni.end(), history[k].begin(),
                   history[k].end(), std::back_inserter(merged));
    uni = std::move(merged);
  }
  return uni;
}

// Boxes of c lying further than margin boxes from every box of src.
std::vector<std::uint32_t> beyond_margin(const std::vector<std::uint32_t>& c,
                                         const std::vector<std::uint32_t>& src,
                                         std::uint32_t margin) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t id : c) {
    auto it = std::lower_bound(src.begin(), src.end(), id);
    std::uint32_t d = UINT32_MAX;
    if (it != src.end()) d = std::min(d, *it - id);
    if (it != src.begin()) d = std::min(d, id - *(it - 1));
    if (d > margin) out.push_back(id);
  }
  return out;
}

}  // namespace

bool OmegaCover::contains_box(std::uint32_t id) const {
  return std::binary_search(boxes.begin(), boxes.end(), id);
}

OmegaCover omega_cover(const FrozenMap& fm, const BoxPartition& part,
                       double seed_lo, double seed_hi, int iterate_cap) {
  const Interval domain{part.lo, part.hi};
  seed_lo = clamp(seed_lo, domain.lo, domain.hi);
  seed_hi = clamp(seed_hi, domain.lo, domain.hi);

  auto cover_of = [&](double lo, double hi) {
    std::vector<std::uint32_t> ids;
    const std::uint32_t a = part.locate(lo), b = part.locate(hi);
    for (std::uint32_t i = a; i <= b; ++i) ids.push_back(i);
    return ids;
  };

  std::vector<std::uint32_t> cur = cover_of(seed_lo, seed_hi);
  std::vector<std::vector<std::uint32_t>> history;
  std::unordered_map<std::uint64_t, std::vector<int>> seen;

  for (int step = 0; step <= iterate_cap; ++step) {
    const std::uint64_t h = hash_set(cur);
    auto it = seen.find(h);
    if (it != seen.end()) {
      for (int j : it->second) {
        if (history[j] == cur) {
          OmegaCover out;
          out.part = part;
          out.preperiod = j;
          out.cycle_len = step - j;
          std::vector<std::uint32_t> uni;
          for (int k = j; k < step; ++k) {
            std::vector<std::uint32_t> merged;
            std::set_union(uni.begin(), uni.end(), history[k].begin(),
                           history[k].end(), std::back_inserter(merged));
            uni = std::move(merged);
          }
          out.boxes = std::move(uni);
          return out;
        }
      }
    }
    seen[h].push_back(static_cast<int>(history.size()));
    history.push_back(cur);

    // advance: union of per-box image coverings
    std::vector<std::uint32_t> next;
    for (std::uint32_t id : cur) {
      double lo, hi;
      if (!image_box(fm, domain, part.box_lo(id), part.box_hi(id), lo, hi)) {
        continue;
      }
      const std::uint32_t a = part.locate(lo), b = part.locate(hi);
      for (std::uint32_t i = a; i <= b; ++i) next.push_back(i);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.empty()) {
      OmegaCover partial;
      partial.part = part;
      partial.boxes = cur;
      throw OmegaLimitError("orbit covering escaped the domain", partial);
    }
    cur = std::move(next);
  }

  OmegaCover partial;
  partial.part = part;
  std::vector<std::uint32_t> uni;
  const int tail = std::max<int>(1, std::min<int>(32, history.size()));
  for (int k = static_cast<int>(history.size()) - tail;
       k < static_cast<int>(history.size()); ++k) {
    std::vector<std::uint32_t> merged;
    std::set_union(uni.begin(), uni.end(), history[k].begin(),
                   history[k].end(), std::back_inserter(merged));
    uni = std::move(merged);
  }
  partial.boxes = std::move(uni);
  throw OmegaLimitError(
      "omega covering did not stabilize within the iterate cap", partial);
}

std::vector<Barricade> find_barricades(const MapFamily& fam, double lam,
                                       double z,
                                       std::vector<double> eps_levels,
                                       std::uint32_t n_boxes,
                                       int iterate_cap) {
  FrozenMap fm = fam.at(lam);
  BoxPartition part(fam.domain.lo, fam.domain.hi, n_boxes);
  const double h = part.h();
  if (eps_levels.empty()) eps_levels = {4.0 * h, 2.0 * h, h};
  if (eps_levels.size() < 2) {
    throw Error("need at least 2 decreasing epsilon levels");
  }
  for (std::size_t i = 0; i < eps_levels.size(); ++i) {
    if (eps_levels[i] <= 0.0 ||
        (i > 0 && eps_levels[i] >= eps_levels[i - 1])) {
      throw Error("need at least 2 decreasing epsilon levels");
    }
  }
  if (z < fam.domain.lo || z > fam.domain.hi) {
    throw Error("blocked source z outside the domain");
  }

  const double e0 = eps_levels.back();                    // finest
  const double e1 = eps_levels[eps_levels.size() - 2];    // next finest
  std::vector<std::uint32_t> s0 =
      sampled_tail_cover(fm, part, z - e0, z + e0, iterate_cap);
  std::vector<std::uint32_t> s1 =
      sampled_tail_cover(fm, part, z - e1, z + e1, iterate_cap);

  // candidate locations: the edge and center boxes of every run of boxes
  // present in the source covering at both radii
  std::vector<std::uint32_t> stable;
  std::set_intersection(s0.begin(), s0.end(), s1.begin(), s1.end(),
                        std::back_inserter(stable));
  std::vector<std::uint32_t> cand;
  std::size_t k = 0;
  while (k < stable.size()) {
    std::size_t j = k;
    while (j + 1 < stable.size() && stable[j + 1] == stable[j] + 1) ++j;
    cand.push_back(stable[k]);
    cand.push_back(stable[(k + j) / 2]);
    cand.push_back(stable[j]);
    k = j + 1;
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  // a candidate blocks when the part of its ball outside the source
  // covering retains material well beyond the source at both radii
  const std::uint32_t margin = 4;
  const int ecap = std::min(iterate_cap, 512);
  struct Flagged {
    std::uint32_t box;
    Barricade b;
  };
  std::vector<Flagged> flags;
  for (std::uint32_t cb : cand) {
    const double y = 0.5 * (part.box_lo(cb) + part.box_hi(cb));
    auto lim0 =
        evolve_outside(fm, part, interval_cover(part, y - e0, y + e0), s0, ecap);
    auto extra0 = beyond_margin(lim0, s0, margin);
    if (extra0.empty()) continue;
    auto lim1 =
        evolve_outside(fm, part, interval_cover(part, y - e1, y + e1), s1, ecap);
    auto extra1 = beyond_margin(lim1, s1, margin);
    if (extra1.empty()) continue;

    Barricade b;
    b.y = y;
    b.z = z;
    b.eps = e0;
    b.s_boxes = s0;
    b.z_boxes = std::move(lim0);
    b.s_boxes_coarse = s1;
    b.z_boxes_coarse = std::move(lim1);
    b.n_extra = static_cast<std::uint32_t>(extra0.size());
    b.part = part;
    flags.push_back({cb, std::move(b)});
  }

  // merge flags on adjacent boxes, keeping the strongest of each cluster
  std::vector<Barricade> out;
  std::size_t i = 0;
  while (i < flags.size()) {
    std::size_t j = i;
    std::size_t best = i;
    while (j + 1 < flags.size() && flags[j + 1].box <= flags[j].box + 2) {
      ++j;
      if (flags[j].b.n_extra > flags[best].b.n_extra) best = j;
    }
    out.push_back(std::move(flags[best].b));
    i = j + 1;
  }
  return out;
}

const char* to_string(OmegaClass c) {
  switch (c) {
    case OmegaClass::periodic: return "periodic";
    case OmegaClass::interval_cycle: return "interval_cycle";
    default: return "cantor_like";
  }
}

OmegaClass classify_omega(const MapFamily& fam, double lam, double z,
                          int period_max) {
  FrozenMap fm = fam.at(lam);
  const double slack = 1e-12 * std::max(1.0, fam.domain.width());
  double x = z;
  const int transient = 10000;
  for (int k = 0; k < transient; ++k) {
    x = fm(x);
    if (!std::isfinite(x) || x < fam.domain.lo - slack ||
        x > fam.domain.hi + slack) {
      throw Error("orbit escaped the domain during omega classification");
    }
    x = clamp(x, fam.domain.lo, fam.domain.hi);
  }

  const int T = 1 << 15;
  std::vector<double> tail(T);
  for (int k = 0; k < T; ++k) {
    tail[k] = x;
    x = fm(x);
    if (!std::isfinite(x) || x < fam.domain.lo - slack ||
        x > fam.domain.hi + slack) {
      throw Error("orbit escaped the domain during omega classification");
    }
    x = clamp(x, fam.domain.lo, fam.domain.hi);
  }

  // periodic: the tail settles onto a cycle of period <= period_max
  const double ptol = 1e-6 * std::max(1.0, fam.domain.width());
  for (int p = 1; p <= period_max; ++p) {
    bool ok = true;
    for (int k = T - 4 * p; k < T - p; ++k) {
      if (std::fabs(tail[k + p] - tail[k]) > ptol) {
        ok = false;
        break;
      }
    }
    if (ok) return OmegaClass::periodic;
  }

  // interval vs thinner: density of the occupied boxes within their convex
  // pieces (gaps of <= 2 boxes are bridged), at two successive resolutions
  auto dense = [&](std::uint32_t n) {
    BoxPartition part(fam.domain.lo, fam.domain.hi, n);
    std::vector<std::uint32_t> occ(tail.size());
    for (std::size_t i = 0; i < tail.size(); ++i) occ[i] = part.locate(tail[i]);
    std::sort(occ.begin(), occ.end());
    occ.erase(std::unique(occ.begin(), occ.end()), occ.end());
    std::size_t k2 = 0;
    while (k2 < occ.size()) {
      std::size_t j = k2;
      while (j + 1 < occ.size() && occ[j + 1] - occ[j] <= 3) ++j;
      const double span = occ[j] - occ[k2] + 1;
      const double cnt = static_cast<double>(j - k2 + 1);
      if (span >= 8 && cnt / span < 0.9) return false;
      k2 = j + 1;
    }
    return true;
  };
  if (dense(1u << 12) && dense(1u << 13)) return OmegaClass::interval_cycle;
  return OmegaClass::cantor_like;
}

const char* to_string(BarricadeCertKind k) {
  switch (k) {
    case BarricadeCertKind::non_hyperbolic: return "non_hyperbolic";
    case BarricadeCertKind::critical_image: return "critical_image";
    case BarricadeCertKind::uncertified: return "uncertified";
    default: return "not_periodic";
  }
}

BarricadeCertificate certify_barricade(const MapFamily& fam, double lam,
                                       const Barricade& b, int period_max) {
  BarricadeCertificate cert;
  const double h = b.part.h();
  const double xlo = std::max(fam.domain.lo, b.y - 4.0 * h);
  const double xhi = std::min(fam.domain.hi, b.y + 4.0 * h);
  auto orbs = find_periodic_orbits_in(fam, lam, period_max, xlo, xhi);
  const PeriodicOrbit* best = nullptr;
  double best_d = 2.0 * h;
  for (const auto& o : orbs) {
    for (double p : o.points) {
      const double d = std::fabs(p - b.y);
      if (d <= best_d) {
        best_d = d;
        best = &o;
      }
    }
  }
  if (!best) {
    cert.kind = BarricadeCertKind::not_periodic;
    return cert;
  }
  cert.orbit = *best;
  const bool nonhyp =
      best->tangential ||
      best->cls == OrbitClass::non_hyperbolic_saddle_node ||
      best->cls == OrbitClass::non_hyperbolic_period_doubling ||
      std::fabs(std::fabs(best->multiplier) - 1.0) <= 0.05;
  if (nonhyp) {
    cert.kind = BarricadeCertKind::non_hyperbolic;
    return cert;
  }
  FrozenMap fm = fam.at(lam);
  const double tol = 2.0 * h;
  for (double c : fm.critical_xs()) {
    double xx = c;
    for (int k = 1; k <= 64; ++k) {
      xx = fm(xx);
      if (!std::isfinite(xx)) break;
      for (double p : best->points) {
        if (std::fabs(xx - p) <= tol) {
          cert.kind = BarricadeCertKind::critical_image;
          cert.crit_x = c;
          cert.steps = k;
          cert.residual = std::fabs(xx - p);
          return cert;
        }
      }
    }
  }
  cert.kind = BarricadeCertKind::uncertified;
  return cert;
}

}  // namespace chainrec
