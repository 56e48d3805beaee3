#include "chainrec/chain_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace chainrec {

BoxPartition::BoxPartition(double lo_, double hi_, std::uint32_t n_)
    : lo(lo_), hi(hi_), n(n_) {
  if (!is_pow2(n_)) throw Error("n_boxes must be a power of two");
  if (!(hi > lo)) throw Error("partition interval must be nonempty");
}

std::uint32_t BoxPartition::locate(double x) const {
  if (x <= lo) return 0;
  if (x >= hi) return n - 1;
  double t = (x - lo) / (hi - lo) * n;
  auto i = static_cast<std::uint32_t>(t);
  if (i >= n) i = n - 1;
  return i;
}

std::uint32_t TransitionGraph::local_of(std::uint32_t id) const {
  if (full()) return id < part.n ? id : UINT32_MAX;
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it == nodes.end() || *it != id) return UINT32_MAX;
  return static_cast<std::uint32_t>(it - nodes.begin());
}

void TransitionGraph::for_each_succ(
    std::uint32_t local, const std::function<void(std::uint32_t)>& fn) const {
  const std::uint32_t a = img_lo[local], b = img_hi[local];
  if (b < a) return;  // image left the active set entirely
  if (full()) {
    for (std::uint32_t j = a; j <= b; ++j) fn(j);
    return;
  }
  auto it = std::lower_bound(nodes.begin(), nodes.end(), a);
  for (; it != nodes.end() && *it <= b; ++it) {
    fn(static_cast<std::uint32_t>(it - nodes.begin()));
  }
}

bool TransitionGraph::has_edge(std::uint32_t id_from,
                               std::uint32_t id_to) const {
  const std::uint32_t l = local_of(id_from);
  if (l == UINT32_MAX || local_of(id_to) == UINT32_MAX) return false;
  return img_lo[l] <= id_to && id_to <= img_hi[l];
}

TransitionGraph build_graph(const FrozenMap& fm, const BoxPartition& part,
                            double eps_num,
                            const std::vector<std::uint32_t>* restrict_to) {
  TransitionGraph g;
  g.part = part;
  const double h = part.h();
  g.eps = eps_num <= 0.0 ? h : std::max(eps_num, h);
  if (restrict_to) g.nodes = *restrict_to;

  const std::uint32_t m = g.n_active();
  g.img_lo.resize(m);
  g.img_hi.resize(m);

  const auto& crit = fm.critical_xs();
  const double dom_lo = part.lo, dom_hi = part.hi;

  // Edge values are shared between neighboring boxes in the full case; the
  // per-box cost is dominated by one map evaluation either way, so evaluate
  // per box for uniformity.
  for (std::uint32_t l = 0; l < m; ++l) {
    const std::uint32_t id = g.id_of(l);
    const double bl = part.box_lo(id), bh = part.box_hi(id);
    double v0 = fm(bl), v1 = fm(bh);
    double mn = std::min(v0, v1), mx = std::max(v0, v1);
    for (double c : crit) {
      if (c > bl && c < bh) {
        const double vc = fm(c);
        mn = std::min(mn, vc);
        mx = std::max(mx, vc);
      }
    }
    mn -= g.eps;
    mx += g.eps;
    // clip to the domain; enclosures entirely outside are parked at the
    // nearest boundary box so every node keeps at least one successor
    if (mx < dom_lo) mx = dom_lo;
    if (mn > dom_hi) mn = dom_hi;
    mn = std::max(mn, dom_lo);
    mx = std::min(mx, dom_hi);
    g.img_lo[l] = part.locate(mn);
    g.img_hi[l] = part.locate(mx);
  }
  return g;
}

namespace {

// Iterative Tarjan SCC.  comp[l] = component id per local node, numbered in
// completion order; recomputed deterministically for a given graph.
std::uint32_t tarjan_scc(const TransitionGraph& g,
                         std::vector<std::uint32_t>& comp) {
  const std::uint32_t n = g.n_active();
  constexpr std::uint32_t NONE = UINT32_MAX;
  std::vector<std::uint32_t> index(n, NONE), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;  // Tarjan stack
  comp.assign(n, NONE);
  std::uint32_t next_index = 0, next_comp = 0;

  // Explicit DFS state: node and iteration cursor over its successor range.
  struct Frame {
    std::uint32_t v;
    std::uint32_t cursor;  // box id cursor within [img_lo, img_hi]
  };
  std::vector<Frame> dfs;

  auto succ_at = [&](std::uint32_t v, std::uint32_t& cursor,
                     std::uint32_t& out) -> bool {
    // advance cursor (a box id) to the next active successor of v
    const std::uint32_t b = g.img_hi[v];
    if (g.img_lo[v] > b) return false;
    while (cursor <= b) {
      std::uint32_t l;
      if (g.full()) {
        l = cursor;
        ++cursor;
        out = l;
        return true;
      }
      auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), cursor);
      if (it == g.nodes.end() || *it > b) return false;
      cursor = *it + 1;
      out = static_cast<std::uint32_t>(it - g.nodes.begin());
      return true;
    }
    return false;
  };

  for (std::uint32_t s = 0; s < n; ++s) {
    if (index[s] != NONE) continue;
    dfs.push_back({s, g.img_lo[s]});
    index[s] = low[s] = next_index++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!dfs.empty()) {
      Frame& f = dfs.back();
      std::uint32_t w;
      if (succ_at(f.v, f.cursor, w)) {
        if (index[w] == NONE) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          dfs.push_back({w, g.img_lo[w]});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        const std::uint32_t v = f.v;
        dfs.pop_back();
        if (low[v] == index[v]) {
          while (true) {
            const std::uint32_t w2 = stack.back();
            stack.pop_back();
            on_stack[w2] = false;
            comp[w2] = next_comp;
            if (w2 == v) break;
          }
          ++next_comp;
        }
        if (!dfs.empty()) {
          low[dfs.back().v] = std::min(low[dfs.back().v], low[v]);
        }
      }
    }
  }
  return next_comp;
}

}  // namespace

ChainSetApprox chain_recurrent_set(const TransitionGraph& g) {
  const std::uint32_t n = g.n_active();
  std::vector<std::uint32_t> comp;
  const std::uint32_t ncomp = tarjan_scc(g, comp);

  // component size, and whether any member has a self-loop
  std::vector<std::uint32_t> size(ncomp, 0);
  std::vector<bool> self(ncomp, false);
  for (std::uint32_t l = 0; l < n; ++l) {
    ++size[comp[l]];
    const std::uint32_t id = g.id_of(l);
    if (g.img_lo[l] <= id && id <= g.img_hi[l]) self[comp[l]] = true;
  }

  ChainSetApprox out;
  out.part = g.part;
  out.eps = g.eps;
  std::vector<std::uint32_t> renumber(ncomp, UINT32_MAX);
  std::uint32_t next = 0;
  // boxes ascending by id; component ids renumbered in order of first box
  std::vector<std::pair<std::uint32_t, std::uint32_t>> rec;  // (id, comp)
  for (std::uint32_t l = 0; l < n; ++l) {
    const std::uint32_t c = comp[l];
    if (size[c] >= 2 || self[c]) rec.emplace_back(g.id_of(l), c);
  }
  std::sort(rec.begin(), rec.end());
  out.boxes.reserve(rec.size());
  out.comp.reserve(rec.size());
  for (const auto& [id, c] : rec) {
    if (renumber[c] == UINT32_MAX) renumber[c] = next++;
    out.boxes.push_back(id);
    out.comp.push_back(renumber[c]);
  }
  out.n_components = next;
  return out;
}

bool ChainSetApprox::contains_box(std::uint32_t id) const {
  return std::binary_search(boxes.begin(), boxes.end(), id);
}

double ChainSetApprox::dist_to(double x) const {
  if (boxes.empty()) return std::numeric_limits<double>::infinity();
  const std::uint32_t id = part.locate(x);
  auto it = std::lower_bound(boxes.begin(), boxes.end(), id);
  double best = std::numeric_limits<double>::infinity();
  if (it != boxes.end()) {
    if (*it == id) return 0.0;
    best = std::min(best, part.box_lo(*it) - x);
  }
  if (it != boxes.begin()) {
    const std::uint32_t p = *(it - 1);
    if (x <= part.box_hi(p)) return 0.0;
    best = std::min(best, x - part.box_hi(p));
  }
  return best;
}

bool epsilon_chain_exists(const TransitionGraph& g, double x_from,
                          double x_to) {
  const std::uint32_t from = g.local_of(g.part.locate(x_from));
  const std::uint32_t to = g.local_of(g.part.locate(x_to));
  if (from == UINT32_MAX || to == UINT32_MAX) return false;
  if (from == to) return true;  // trivial chain within one box
  std::vector<bool> seen(g.n_active(), false);
  std::deque<std::uint32_t> q;
  seen[from] = true;
  q.push_back(from);
  while (!q.empty()) {
    const std::uint32_t v = q.front();
    q.pop_front();
    bool hit = false;
    g.for_each_succ(v, [&](std::uint32_t w) {
      if (w == to) hit = true;
      if (!seen[w]) {
        seen[w] = true;
        q.push_back(w);
      }
    });
    if (hit) return true;
  }
  return false;
}

ChainSetApprox refine(const MapFamily& fam, double lam,
                      const ChainSetApprox& parent) {
  const std::uint64_t n2 = 2ull * parent.part.n;
  if (n2 > (1ull << 24)) {
    throw RefineLimitError(
        "partition limit exceeded: refinement would require n_boxes > 2^24",
        parent);
  }
  BoxPartition part2(parent.part.lo, parent.part.hi,
                     static_cast<std::uint32_t>(n2));
  const double eps2 = std::max(part2.h(), parent.eps / 2.0);

  // children of recurrent parents plus a one-parent-box margin
  std::vector<std::uint32_t> active;
  active.reserve(parent.boxes.size() * 6);
  for (std::uint32_t p : parent.boxes) {
    const std::uint32_t plo = p == 0 ? 0 : p - 1;
    const std::uint32_t phi = std::min(parent.part.n - 1, p + 1);
    for (std::uint32_t q = plo; q <= phi; ++q) {
      active.push_back(2 * q);
      active.push_back(2 * q + 1);
    }
  }
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());

  FrozenMap fm = fam.at(lam);
  TransitionGraph g = build_graph(fm, part2, eps2, &active);
  return chain_recurrent_set(g);
}

}  // namespace chainrec
