#pragma once
// Box partitions of the domain, outer-approximation transition graphs, and
// the recurrent set computed from strongly connected components.
//
// A graph node is a partition box.  The image enclosure of a box is the
// interval spanned by the map values at the box endpoints and at any
// critical points inside the box, fattened by eps_num (>= box width) and
// clipped to the domain.  A box is recurrent when it lies in a strongly
// connected component with >= 2 nodes or carries a self-loop.

#include <cstdint>
#include <functional>
#include <vector>

#include "chainrec/map_family.hpp"

namespace chainrec {

struct BoxPartition {
  double lo = 0.0;
  double hi = 1.0;
  std::uint32_t n = 1;  // number of boxes; must be a power of two

  BoxPartition() = default;
  BoxPartition(double lo_, double hi_, std::uint32_t n_);
  double h() const { return (hi - lo) / n; }
  double box_lo(std::uint32_t i) const { return lo + (hi - lo) * i / n; }
  double box_hi(std::uint32_t i) const { return lo + (hi - lo) * (i + 1) / n; }
  std::uint32_t locate(double x) const;  // clamped to [0, n-1]
};

// Transition graph over an active subset of boxes (the full partition when
// `nodes` is empty).  Successor sets are contiguous box-id ranges
// intersected with the active set, stored as one range per node.
class TransitionGraph {
 public:
  BoxPartition part;
  double eps = 0.0;
  std::vector<std::uint32_t> nodes;  // sorted active ids; empty = all boxes
  std::vector<std::uint32_t> img_lo, img_hi;  // per active node, inclusive

  bool full() const { return nodes.empty(); }
  std::uint32_t n_active() const {
    return full() ? part.n : static_cast<std::uint32_t>(nodes.size());
  }
  std::uint32_t id_of(std::uint32_t local) const {
    return full() ? local : nodes[local];
  }
  // local index of a box id, or UINT32_MAX if inactive
  std::uint32_t local_of(std::uint32_t id) const;
  // invoke fn(local_succ) for each active successor of local node
  void for_each_succ(std::uint32_t local,
                     const std::function<void(std::uint32_t)>& fn) const;
  bool has_edge(std::uint32_t id_from, std::uint32_t id_to) const;
};

struct ChainSetApprox {
  BoxPartition part;
  double eps = 0.0;
  std::vector<std::uint32_t> boxes;  // recurrent box ids, sorted
  std::vector<std::uint32_t> comp;   // component id per entry of `boxes`
  std::uint32_t n_components = 0;

  double measure() const { return boxes.size() * part.h(); }
  bool contains_box(std::uint32_t id) const;
  bool contains_x(double x) const { return contains_box(part.locate(x)); }
  // distance from x to the nearest recurrent box (0 if inside one)
  double dist_to(double x) const;
};

// eps_num <= 0 selects the default eps_num = h; eps_num < h is floored to h.
// With `restrict_to` non-null the graph is built over that sorted active set
// only (successors outside it are dropped).
TransitionGraph build_graph(const FrozenMap& fm, const BoxPartition& part,
                            double eps_num = 0.0,
                            const std::vector<std::uint32_t>* restrict_to =
                                nullptr);

// Recurrent boxes with component labels via Tarjan SCC (iterative).
ChainSetApprox chain_recurrent_set(const TransitionGraph& g);

// True when a path of graph edges leads from the box of x_from to the box
// of x_to (equivalently, an eps-chain at the working resolution exists).
bool epsilon_chain_exists(const TransitionGraph& g, double x_from,
                          double x_to);

// One refinement step: doubled box count, halved eps (floored at the new
// box width), restricted to the parent's recurrent boxes plus a one-box
// margin.  The result is a subset of the parent covering.
// Raises RefineLimitError with the parent as partial result when the box
// count would exceed 2^24.
class RefineLimitError : public Error {
 public:
  ChainSetApprox partial;
  RefineLimitError(std::string msg, ChainSetApprox p)
      : Error(std::move(msg)), partial(std::move(p)) {}
};
ChainSetApprox refine(const MapFamily& fam, double lam,
                      const ChainSetApprox& parent);

}  // namespace chainrec
