#pragma once
// Limit-set box coverings, barricade detection, and a coarse classifier of
// omega-limit sets.  A barricade is a point of the limit covering of a ball
// around z whose own ball's limit covering strictly exceeds it: chains from
// z must jump past such a point to reach the extra material.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chainrec/chain_graph.hpp"
#include "chainrec/orbits.hpp"

namespace chainrec {

// Box covering of the forward-asymptotic part of a seed interval: the box
// image sequence is iterated until it enters a cycle, and the union over
// the cycle is returned (transient boxes are excluded).
struct OmegaCover {
  BoxPartition part{0.0, 1.0, 1};
  std::vector<std::uint32_t> boxes;  // sorted box ids
  int preperiod = 0;
  int cycle_len = 0;
  bool contains_box(std::uint32_t id) const;
};

class OmegaLimitError : public Error {
 public:
  OmegaLimitError(const std::string& msg, OmegaCover partial_)
      : Error(msg), partial(std::move(partial_)) {}
  OmegaCover partial;
};

// Throws OmegaLimitError when the set sequence does not enter a cycle
// within iterate_cap steps, with the running union attached.
OmegaCover omega_cover(const FrozenMap& fm, const BoxPartition& part,
                       double seed_lo, double seed_hi, int iterate_cap = 4096);

struct Barricade {
  double y = 0.0;  // barricade location (center of a box run)
  double z = 0.0;  // blocked source point
  double eps = 0.0;  // finest ball radius used
  // comparison record at the two finest ball radii
  std::vector<std::uint32_t> s_boxes;      // limit covering around z
  std::vector<std::uint32_t> z_boxes;      // limit covering around y
  std::vector<std::uint32_t> s_boxes_coarse;
  std::vector<std::uint32_t> z_boxes_coarse;
  std::uint32_t n_extra = 0;  // |z_boxes \ s_boxes| at the finest radius
  BoxPartition part{0.0, 1.0, 1};
};

// Detects barricades for z at one parameter value.  eps_levels must hold at
// least two decreasing ball radii; an empty list selects {4h, 2h, h} at
// n_boxes.  Candidate locations are runs of boxes present in the limit
// covering of the ball around z at both of the two finest radii; a
// candidate is a barricade when its own ball's limit covering reaches boxes
// the source covering does not, again at both radii.
std::vector<Barricade> find_barricades(const MapFamily& fam, double lam,
                                       double z,
                                       std::vector<double> eps_levels = {},
                                       std::uint32_t n_boxes = 1u << 12,
                                       int iterate_cap = 4096);

enum class OmegaClass { periodic, interval_cycle, cantor_like };
const char* to_string(OmegaClass c);

// Classifies the omega-limit set of the point z by the box occupancy of its
// orbit tail: few boxes revisited cyclically -> periodic; occupancy dense
// (ratio >= 0.9) inside its convex pieces at two successive resolutions ->
// interval_cycle; anything thinner -> cantor_like.  Escape throws.
OmegaClass classify_omega(const MapFamily& fam, double lam, double z,
                          int period_max = 16);

// Certification of a barricade against the periodic-barricade dichotomy:
// a barricade matched to a periodic orbit must be non-hyperbolic or must be
// reached by the forward orbit of a critical point.
enum class BarricadeCertKind {
  non_hyperbolic,   // matched orbit has |multiplier| within 0.05 of 1
  critical_image,   // some critical point maps onto the orbit in <= 64 steps
  uncertified,      // periodic match found, but neither certificate applies
  not_periodic      // no periodic orbit at the barricade location
};
const char* to_string(BarricadeCertKind k);

struct BarricadeCertificate {
  BarricadeCertKind kind = BarricadeCertKind::not_periodic;
  std::optional<PeriodicOrbit> orbit;
  double crit_x = 0.0;  // critical point of the certificate, if any
  int steps = 0;        // iterates from crit_x to the orbit
  double residual = 0.0;
};

BarricadeCertificate certify_barricade(const MapFamily& fam, double lam,
                                       const Barricade& b,
                                       int period_max = 16);

}  // namespace chainrec
