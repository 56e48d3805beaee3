#include "chainrec/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace chainrec {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw ConfigError(os.str());
}

double parse_num(const std::string& origin, int line, const std::string& key,
                 const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(origin, line, "key '" + key + "': cannot parse number '" + v + "'");
  }
}

long parse_int(const std::string& origin, int line, const std::string& key,
               const std::string& v) {
  try {
    std::size_t used = 0;
    const long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(origin, line, "key '" + key + "': cannot parse integer '" + v + "'");
  }
}

bool parse_bool(const std::string& origin, int line, const std::string& key,
                const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(origin, line, "key '" + key + "': cannot parse boolean '" + v + "'");
}

Interval parse_pair(const std::string& origin, int line,
                    const std::string& key, const std::string& v) {
  std::istringstream is(v);
  double a, b;
  if (!(is >> a >> b)) {
    fail(origin, line, "key '" + key + "': expected two numbers, got '" + v +
                           "'");
  }
  std::string rest;
  if (is >> rest) {
    fail(origin, line, "key '" + key + "': expected two numbers, got '" + v +
                           "'");
  }
  return {a, b};
}

std::vector<double> parse_list(const std::string& origin, int line,
                               const std::string& key, std::string v) {
  for (auto& ch : v) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream is(v);
  std::vector<double> out;
  double d;
  while (is >> d) out.push_back(d);
  if (!is.eof()) {
    fail(origin, line, "key '" + key + "': cannot parse value list");
  }
  return out;
}

std::vector<CoeffRow> parse_rows(const std::string& origin, int line,
                                 const std::string& key,
                                 const std::string& v) {
  std::vector<CoeffRow> rows;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    std::size_t semi = v.find(';', pos);
    std::string piece =
        trim(semi == std::string::npos ? v.substr(pos)
                                       : v.substr(pos, semi - pos));
    if (!piece.empty()) {
      std::istringstream is(piece);
      CoeffRow row;
      if (!(is >> row.c0)) {
        fail(origin, line,
             "key '" + key + "': cannot parse coefficient row '" + piece +
                 "'");
      }
      if (!(is >> row.c1)) row.c1 = 0.0;
      std::string rest;
      if (is >> rest) {
        fail(origin, line,
             "key '" + key + "': cannot parse coefficient row '" + piece +
                 "'");
      }
      rows.push_back(row);
    }
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  if (rows.empty()) {
    fail(origin, line, "key '" + key + "': no coefficient rows");
  }
  return rows;
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  bool has_kind = false;
  double grid_lo = 0.0, grid_hi = 0.0;
  long grid_count = 0;
  bool has_grid_lo = false, has_grid_hi = false;
  std::vector<double> grid_list;

  std::istringstream is(text);
  std::string raw;
  int line = 0;
  std::string section;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    const std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "family" && section != "grid" &&
          section != "resolution" && section != "tolerances" &&
          section != "output") {
        fail(origin, line, "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      fail(origin, line, "expected key=value, got '" + s + "'");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(origin, line, "empty key");
    if (section.empty()) {
      fail(origin, line, "key '" + key + "' outside any section");
    }

    if (section == "family") {
      if (key == "kind") {
        if (val == "logistic") {
          cfg.kind = FamilyKind::logistic;
        } else if (val == "quadratic") {
          cfg.kind = FamilyKind::quadratic;
        } else if (val == "cubic") {
          cfg.kind = FamilyKind::cubic;
        } else if (val == "polynomial") {
          cfg.kind = FamilyKind::polynomial;
        } else {
          fail(origin, line, "key 'kind': unknown family kind '" + val + "'");
        }
        has_kind = true;
      } else if (key == "name") {
        cfg.name = val;
      } else if (key == "coefficients") {
        cfg.rows = parse_rows(origin, line, key, val);
      } else if (key == "domain") {
        cfg.domain = parse_pair(origin, line, key, val);
        cfg.has_domain = true;
      } else if (key == "lambda_window") {
        cfg.lambda_window = parse_pair(origin, line, key, val);
        cfg.has_window = true;
      } else if (key == "allow_escape") {
        cfg.allow_escape = parse_bool(origin, line, key, val);
      } else {
        fail(origin, line, "unknown key '" + key + "' in section [family]");
      }
    } else if (section == "grid") {
      if (key == "lo") {
        grid_lo = parse_num(origin, line, key, val);
        has_grid_lo = true;
      } else if (key == "hi") {
        grid_hi = parse_num(origin, line, key, val);
        has_grid_hi = true;
      } else if (key == "count") {
        grid_count = parse_int(origin, line, key, val);
        if (grid_count < 0) fail(origin, line, "key 'count': must be >= 0");
      } else if (key == "list") {
        grid_list = parse_list(origin, line, key, val);
      } else {
        fail(origin, line, "unknown key '" + key + "' in section [grid]");
      }
    } else if (section == "resolution") {
      if (key == "n_boxes") {
        const long n = parse_int(origin, line, key, val);
        if (n <= 0 || !is_pow2(static_cast<std::uint64_t>(n))) {
          fail(origin, line, "n_boxes must be a power of two");
        }
        cfg.res.n_boxes = static_cast<std::uint32_t>(n);
      } else if (key == "eps_num") {
        cfg.res.eps_num = parse_num(origin, line, key, val);
      } else if (key == "refine_levels") {
        cfg.res.refine_levels =
            static_cast<int>(parse_int(origin, line, key, val));
      } else if (key == "delta_boxes") {
        cfg.delta_boxes = parse_num(origin, line, key, val);
      } else if (key == "period_max") {
        cfg.period_max = static_cast<int>(parse_int(origin, line, key, val));
      } else if (key == "iterate_cap") {
        cfg.iterate_cap = static_cast<int>(parse_int(origin, line, key, val));
      } else if (key == "ladder_top") {
        const long n = parse_int(origin, line, key, val);
        if (n <= 0 || !is_pow2(static_cast<std::uint64_t>(n))) {
          fail(origin, line, "n_boxes must be a power of two");
        }
        cfg.ladder_top = static_cast<std::uint32_t>(n);
      } else {
        fail(origin, line,
             "unknown key '" + key + "' in section [resolution]");
      }
    } else if (section == "tolerances") {
      const double d = parse_num(origin, line, key, val);
      if (d <= 0.0) fail(origin, line, "key '" + key + "': must be > 0");
      if (key == "tol_orbit") {
        cfg.tol_orbit = d;
      } else if (key == "tol_hyp") {
        cfg.tol_hyp = d;
      } else if (key == "tol_land") {
        cfg.tol_land = d;
      } else if (key == "tol_sn") {
        cfg.tol_sn = d;
      } else {
        fail(origin, line,
             "unknown key '" + key + "' in section [tolerances]");
      }
    } else {  // output
      if (key == "dir") {
        cfg.out_dir = val;
      } else if (key == "workers") {
        const long w = parse_int(origin, line, key, val);
        if (w < 1 || w > 256) {
          fail(origin, line, "key 'workers': must be in [1, 256]");
        }
        cfg.workers = static_cast<int>(w);
      } else {
        fail(origin, line, "unknown key '" + key + "' in section [output]");
      }
    }
  }

  if (!has_kind) {
    throw ConfigError(origin + ": missing required key 'kind' in [family]");
  }
  if (!cfg.has_window) {
    throw ConfigError(origin +
                      ": missing required key 'lambda_window' in [family]");
  }
  if (!(cfg.lambda_window.lo < cfg.lambda_window.hi)) {
    throw ConfigError(origin + ": lambda_window must satisfy lo < hi");
  }
  if (cfg.name.empty()) {
    switch (cfg.kind) {
      case FamilyKind::logistic: cfg.name = "logistic"; break;
      case FamilyKind::quadratic: cfg.name = "quadratic"; break;
      case FamilyKind::cubic: cfg.name = "cubic"; break;
      default: cfg.name = "polynomial"; break;
    }
  }
  if ((cfg.kind == FamilyKind::cubic || cfg.kind == FamilyKind::polynomial)) {
    if (cfg.rows.empty()) {
      throw ConfigError(origin +
                        ": family kind requires a 'coefficients' key");
    }
    if (!cfg.has_domain) {
      throw ConfigError(origin + ": family kind requires a 'domain' key");
    }
  }

  // resolve the grid
  if (!grid_list.empty()) {
    cfg.lambdas = grid_list;
  } else if (grid_count > 0) {
    if (!has_grid_lo || !has_grid_hi) {
      throw ConfigError(origin + ": [grid] count given without lo/hi");
    }
    if (!(grid_lo < grid_hi)) {
      throw ConfigError(origin + ": [grid] requires lo < hi");
    }
    cfg.lambdas.reserve(grid_count);
    for (long i = 0; i < grid_count; ++i) {
      const double t = grid_count == 1
                           ? 0.0
                           : static_cast<double>(i) / (grid_count - 1);
      cfg.lambdas.push_back(grid_lo + t * (grid_hi - grid_lo));
    }
  }
  for (std::size_t i = 1; i < cfg.lambdas.size(); ++i) {
    if (!(cfg.lambdas[i] > cfg.lambdas[i - 1])) {
      throw ConfigError(origin +
                        ": grid values must be strictly increasing");
    }
  }
  for (double lam : cfg.lambdas) {
    if (lam < cfg.lambda_window.lo || lam > cfg.lambda_window.hi) {
      std::ostringstream os;
      os << origin << ": grid value " << lam
         << " outside lambda_window [" << cfg.lambda_window.lo << ", "
         << cfg.lambda_window.hi << "]";
      throw ConfigError(os.str());
    }
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config_text(os.str(), path);
}

MapFamily build_family_impl(const RunConfig& cfg) {
  FamilyOptions opts;
  opts.allow_escape = cfg.allow_escape;
  switch (cfg.kind) {
    case FamilyKind::logistic: {
      MapFamily fam = make_logistic(cfg.lambda_window);
      if (!cfg.name.empty()) fam.family_id = cfg.name;
      return fam;
    }
    case FamilyKind::quadratic: {
      MapFamily fam = make_quadratic(cfg.lambda_window);
      if (!cfg.name.empty()) fam.family_id = cfg.name;
      return fam;
    }
    case FamilyKind::cubic: {
      if (cfg.rows.size() != 4) {
        throw ConfigError("cubic family needs exactly 4 coefficient rows");
      }
      MapFamily fam =
          make_cubic(cfg.rows, cfg.domain, cfg.lambda_window, opts);
      if (!cfg.name.empty()) fam.family_id = cfg.name;
      return fam;
    }
    default: {
      return make_polynomial(cfg.rows, cfg.domain, cfg.lambda_window,
                             cfg.name, opts);
    }
  }
}

MapFamily RunConfig::build_family() const { return build_family_impl(*this); }

DetectSettings RunConfig::detect_settings() const {
  DetectSettings s;
  s.delta_boxes = delta_boxes;
  s.period_max = period_max;
  s.iterate_cap = iterate_cap;
  s.ladder_top = ladder_top;
  s.tol_orbit = tol_orbit;
  s.tol_hyp = tol_hyp;
  s.tol_land = tol_land;
  s.tol_sn = tol_sn;
  return s;
}

}  // namespace chainrec
