#pragma once
// Parameter sweeps of the recurrent covering and detection of explosion
// events: parameter values where whole regions of the chain-recurrent set
// appear or disappear discontinuously, classified by cause.

#include <map>
#include <optional>
#include <vector>

#include "chainrec/chain_graph.hpp"
#include "chainrec/homoclinic.hpp"

namespace chainrec {

struct ScanResolution {
  std::uint32_t n_boxes = 1u << 12;
  double eps_num = 0.0;  // <= 0 selects the default (one box width)
  int refine_levels = 0;
};

struct RecurrenceProfile {
  double lam = 0.0;
  ChainSetApprox cover;
  std::vector<std::string> notes;
  double measure() const { return cover.measure(); }
  std::uint32_t n_components() const { return cover.n_components; }
};

// One profile per parameter value, in input order (deterministic for any
// worker count; workers only parallelize independent parameter values).
std::vector<RecurrenceProfile> sweep(const MapFamily& fam,
                                     const std::vector<double>& lambdas,
                                     const ScanResolution& res,
                                     int workers = 1);

// side = parameter side on which the recurrence persists; lambda0 is the
// boundary of that side.
enum class EventSide { below, above };
enum class EventCause { saddle_node, tangency_crossing, unclassified };
const char* to_string(EventSide s);
const char* to_string(EventCause c);

struct ExplosionEvent {
  double x = 0.0;        // representative point of the exploded region
  double lambda0 = 0.0;  // onset parameter
  double bracket = 0.0;  // final bisection bracket width (<= 1e-8)
  EventSide side = EventSide::below;
  double delta = 0.0;  // neighborhood radius used by the detector
  EventCause cause = EventCause::unclassified;
  bool resolution_limited = false;

  // evidence
  std::optional<PeriodicOrbit> orbit;  // saddle-node evidence
  double orbit_lambda = 0.0;
  std::optional<HomoclinicRecord> record;  // tangency evidence
  double record_lambda = 0.0;
  double void_onset = 0.0;  // parameter offset at which the delta-void opens
  std::vector<double> member_xs;
  std::vector<std::string> notes;
};

struct DetectSettings {
  double delta_boxes = 8.0;  // delta = delta_boxes * base box width
  int period_max = 16;
  int iterate_cap = 2048;
  int tangency_iterate_cap = 24;     // landing depth for cause evidence
  std::uint32_t ladder_top = 1u << 21;  // finest bisection resolution
  std::uint32_t scaling_level = 1u << 16;  // resolution for void certificates
  double cluster_radius = 1e-4;
  double cause_window = 5e-4;  // parameter half-window for cause searches
  double tol_orbit = 1e-9;
  double tol_hyp = 1e-4;
  double tol_land = 1e-9;
  double tol_sn = 1e-3;
};

// Scan adjacent profile pairs for boxes recurrent on one side with a
// recurrence-free delta-neighborhood on the other; bisect each candidate's
// recurrence boundary through a resolution ladder; cluster in the
// parameter; attach cause evidence (saddle-node fold or polished tangency
// record).  Candidates without evidence face a distance-scaling probe:
// plateau distances mean a genuine jump (kept, unclassified), growing
// distances mean continuous deformation (suppressed).
// Requires >= 3 profiles.  Events are sorted by (lambda0, x).
std::vector<ExplosionEvent> detect_explosions(
    const MapFamily& fam, const std::vector<RecurrenceProfile>& profiles,
    const DetectSettings& settings = {});

// Memoizing builder for recurrent coverings at (resolution, parameter)
// pairs; shared by the detector and by diagnostics.
class CoverCache {
 public:
  explicit CoverCache(const MapFamily& fam, std::size_t per_level_cap = 12)
      : fam_(&fam), cap_(per_level_cap) {}
  const ChainSetApprox& at(double lam, std::uint32_t n_boxes);

 private:
  const MapFamily* fam_;
  std::size_t cap_;
  struct Entry {
    double lam;
    std::uint64_t tick;
    ChainSetApprox cover;
  };
  std::map<std::uint32_t, std::vector<Entry>> levels_;
  std::uint64_t tick_ = 0;
};

}  // namespace chainrec
