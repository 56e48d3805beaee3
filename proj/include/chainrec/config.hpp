#pragma once
// Flat key=value run configuration with [section] headers.
//
// Sections and keys (defaults in parentheses):
//   [family]
//     kind          logistic | quadratic | cubic | polynomial   (required)
//     name          family identifier                            (= kind)
//     coefficients  rows "c0 c1" separated by ';'  (cubic/polynomial only)
//     domain        "lo hi"                        (cubic/polynomial only)
//     lambda_window "lo hi"                                      (required)
//     allow_escape  true | false                                 (false)
//   [grid]
//     lo, hi, count   uniform grid of `count` values             (count 0)
//     list            explicit values separated by ',' or space
//   [resolution]
//     n_boxes       power of two                                 (4096)
//     eps_num       numerical fattening, 0 = one box width       (0)
//     refine_levels refinement passes per profile                (0)
//     delta_boxes   void radius in base box widths               (8)
//     period_max    largest period searched                      (16)
//     iterate_cap   orbit iteration cap                          (2048)
//     ladder_top    finest bisection resolution                  (2097152)
//   [tolerances]
//     tol_orbit (1e-9), tol_hyp (1e-4), tol_land (1e-9), tol_sn (1e-3)
//   [output]
//     dir           output directory                             (".")
//     workers       sweep worker count                           (1)

#include <string>
#include <vector>

#include "chainrec/explosion_scan.hpp"
#include "chainrec/map_family.hpp"

namespace chainrec {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  // family
  FamilyKind kind = FamilyKind::logistic;
  std::string name;
  std::vector<CoeffRow> rows;
  Interval domain{0.0, 1.0};
  bool has_domain = false;
  Interval lambda_window{0.0, 0.0};
  bool has_window = false;
  bool allow_escape = false;
  // grid
  std::vector<double> lambdas;
  // resolution
  ScanResolution res;
  double delta_boxes = 8.0;
  int period_max = 16;
  int iterate_cap = 2048;
  std::uint32_t ladder_top = 1u << 21;
  // tolerances
  double tol_orbit = 1e-9;
  double tol_hyp = 1e-4;
  double tol_land = 1e-9;
  double tol_sn = 1e-3;
  // output
  std::string out_dir = ".";
  int workers = 1;

  MapFamily build_family() const;
  DetectSettings detect_settings() const;
};

// Both throw ConfigError with "<origin>:<line>:" diagnostics for malformed
// lines and unknown sections or keys, and for failed validation.
RunConfig parse_config_text(const std::string& text,
                            const std::string& origin);
RunConfig parse_config(const std::string& path);

}  // namespace chainrec
