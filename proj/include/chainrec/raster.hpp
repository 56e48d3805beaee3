#pragma once
// Binary run-length-encoded recurrence raster.
//
// Layout (all integers little-endian):
//   magic   4 bytes  "CHXR"
//   version u32      currently 1
//   n_rows  u32
//   n_boxes u32
//   domain  2 x f64  lower and upper endpoint
// then per row:
//   lambda  f64
//   n_runs  u32
//   runs    n_runs x (u32 start, u32 len)   start in [0, n_boxes)

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chainrec/chain_graph.hpp"
#include "chainrec/explosion_scan.hpp"

namespace chainrec {

struct RasterRow {
  double lam = 0.0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> runs;  // (start, len)
};

struct Raster {
  std::uint32_t version = 1;
  std::uint32_t n_boxes = 0;
  Interval domain{0.0, 1.0};
  std::vector<RasterRow> rows;
};

// Builds a row from a recurrent covering (consecutive boxes are merged).
RasterRow raster_row(double lam, const std::vector<std::uint32_t>& boxes);

Raster raster_of(const std::vector<RecurrenceProfile>& profiles,
                 std::uint32_t n_boxes, Interval domain);

std::vector<std::uint8_t> serialize_raster(const Raster& r);
Raster parse_raster(const std::vector<std::uint8_t>& bytes);

void write_raster(const std::string& path, const Raster& r);
// Throws on a short file ("unexpected EOF in raster"), a bad magic, or an
// unsupported version.
Raster read_raster(const std::string& path);

}  // namespace chainrec
