#include "chainrec/raster.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace chainrec {

namespace {

constexpr char kMagic[4] = {'C', 'H', 'X', 'R'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

struct Reader {
  const std::vector<std::uint8_t>& b;
  std::size_t pos = 0;
  void need(std::size_t n) const {
    if (pos + n > b.size()) throw Error("unexpected EOF in raster");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[pos + i]) << (8 * i);
    pos += 8;
    double d;
    std::memcpy(&d, &v, 8);
    return d;
  }
};

}  // namespace

RasterRow raster_row(double lam, const std::vector<std::uint32_t>& boxes) {
  RasterRow row;
  row.lam = lam;
  std::size_t k = 0;
  while (k < boxes.size()) {
    std::size_t j = k;
    while (j + 1 < boxes.size() && boxes[j + 1] == boxes[j] + 1) ++j;
    row.runs.emplace_back(boxes[k],
                          static_cast<std::uint32_t>(j - k + 1));
    k = j + 1;
  }
  return row;
}

Raster raster_of(const std::vector<RecurrenceProfile>& profiles,
                 std::uint32_t n_boxes, Interval domain) {
  Raster r;
  r.n_boxes = n_boxes;
  r.domain = domain;
  r.rows.reserve(profiles.size());
  for (const auto& p : profiles) {
    // profiles may have been refined past the announced resolution; rows are
    // emitted at the raster's own resolution by box-id rescaling
    if (p.cover.part.n == n_boxes) {
      r.rows.push_back(raster_row(p.lam, p.cover.boxes));
    } else {
      const double scale = double(n_boxes) / double(p.cover.part.n);
      std::vector<std::uint32_t> ids;
      for (std::uint32_t b : p.cover.boxes) {
        const auto lo = static_cast<std::uint32_t>(b * scale);
        const auto hi = static_cast<std::uint32_t>((b + 1) * scale);
        for (std::uint32_t i = lo; i < std::max(hi, lo + 1) && i < n_boxes;
             ++i) {
          ids.push_back(i);
        }
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      r.rows.push_back(raster_row(p.lam, ids));
    }
  }
  return r;
}

std::vector<std::uint8_t> serialize_raster(const Raster& r) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, r.version);
  put_u32(out, static_cast<std::uint32_t>(r.rows.size()));
  put_u32(out, r.n_boxes);
  put_f64(out, r.domain.lo);
  put_f64(out, r.domain.hi);
  for (const auto& row : r.rows) {
    put_f64(out, row.lam);
    put_u32(out, static_cast<std::uint32_t>(row.runs.size()));
    for (const auto& run : row.runs) {
      put_u32(out, run.first);
      put_u32(out, run.second);
    }
  }
  return out;
}

Raster parse_raster(const std::vector<std::uint8_t>& bytes) {
  Reader rd{bytes};
  rd.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error("bad raster magic (expected CHXR)");
  }
  rd.pos = 4;
  Raster r;
  r.version = rd.u32();
  if (r.version != 1) {
    throw Error("unsupported raster version " + std::to_string(r.version));
  }
  const std::uint32_t n_rows = rd.u32();
  r.n_boxes = rd.u32();
  r.domain.lo = rd.f64();
  r.domain.hi = rd.f64();
  r.rows.resize(n_rows);
  for (auto& row : r.rows) {
    row.lam = rd.f64();
    const std::uint32_t n_runs = rd.u32();
    row.runs.resize(n_runs);
    for (auto& run : row.runs) {
      run.first = rd.u32();
      run.second = rd.u32();
      if (run.first >= r.n_boxes || run.second == 0 ||
          run.first + run.second > r.n_boxes) {
        throw Error("raster run out of range");
      }
    }
  }
  if (rd.pos != bytes.size()) {
    throw Error("trailing bytes after raster payload");
  }
  return r;
}

void write_raster(const std::string& path, const Raster& r) {
  const auto bytes = serialize_raster(r);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open raster file for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("short write to raster file: " + path);
}

Raster read_raster(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open raster file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return parse_raster(bytes);
}

}  // namespace chainrec
