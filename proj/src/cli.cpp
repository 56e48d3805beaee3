#include "chainrec/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "chainrec/explosion_scan.hpp"
#include "chainrec/homoclinic.hpp"
#include "chainrec/raster.hpp"

namespace chainrec {

namespace {

// shortest round-trip decimal form (matches the JSON encoder, so CSV and
// JSONL agree byte-for-byte across runs and worker counts)
std::string fmt(double d) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, res.ptr);
}

const char* orbit_class_name(OrbitClass c) {
  switch (c) {
    case OrbitClass::attracting: return "attracting";
    case OrbitClass::repelling: return "repelling";
    case OrbitClass::non_hyperbolic_saddle_node:
      return "non_hyperbolic_saddle_node";
    default: return "non_hyperbolic_period_doubling";
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory: " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open output file: " + path);
  f << text;
  if (!f) throw Error("short write to output file: " + path);
}

nlohmann::json event_json(const ExplosionEvent& ev) {
  nlohmann::json j;
  j["x"] = ev.x;
  j["lambda0"] = ev.lambda0;
  j["bracket"] = ev.bracket;
  j["side"] = to_string(ev.side);
  j["delta"] = ev.delta;
  j["cause"] = to_string(ev.cause);
  j["resolution_limited"] = ev.resolution_limited;
  j["void_onset"] = ev.void_onset;
  j["member_xs"] = ev.member_xs;
  j["notes"] = ev.notes;
  if (ev.orbit) {
    nlohmann::json o;
    o["lambda"] = ev.orbit_lambda;
    o["period"] = ev.orbit->period;
    o["multiplier"] = ev.orbit->multiplier;
    o["points"] = ev.orbit->points;
    o["class"] = orbit_class_name(ev.orbit->cls);
    o["tangential"] = ev.orbit->tangential;
    j["orbit"] = o;
  }
  if (ev.record) {
    const auto& r = *ev.record;
    nlohmann::json o;
    o["lambda"] = ev.record_lambda;
    o["x0"] = r.x0;
    o["period"] = r.period;
    o["multiplier"] = r.multiplier;
    o["w"] = r.w;
    o["L"] = r.L;
    o["landing_residual"] = r.landing_residual;
    o["approach_branch"] = to_string(r.approach_branch);
    o["local_side"] = to_string(r.local_side);
    o["crossing"] = r.crossing;
    if (r.exclusive_branch) {
      o["exclusive_branch"] = to_string(*r.exclusive_branch);
    } else {
      o["exclusive_branch"] = nullptr;
    }
    j["record"] = o;
  }
  return j;
}

std::string covering_csv(const std::vector<RecurrenceProfile>& profiles) {
  std::ostringstream os;
  os << "lambda,box_lo,box_hi,component_id\n";
  for (const auto& p : profiles) {
    const auto& part = p.cover.part;
    for (std::size_t i = 0; i < p.cover.boxes.size(); ++i) {
      const std::uint32_t id = p.cover.boxes[i];
      os << fmt(p.lam) << ',' << fmt(part.box_lo(id)) << ','
         << fmt(part.box_hi(id)) << ',' << p.cover.comp[i] << '\n';
    }
  }
  return os.str();
}

}  // namespace

int cmd_chain(const RunConfig& cfg, std::ostream& log) {
  MapFamily fam = cfg.build_family();
  auto profiles = sweep(fam, cfg.lambdas, cfg.res, cfg.workers);
  ensure_dir(cfg.out_dir);
  write_text(cfg.out_dir + "/covering.csv", covering_csv(profiles));
  const std::uint32_t n_out =
      profiles.empty() ? cfg.res.n_boxes : profiles.front().cover.part.n;
  write_raster(cfg.out_dir + "/raster.chxr",
               raster_of(profiles, n_out, fam.domain));
  for (const auto& p : profiles) {
    log << "lambda " << fmt(p.lam) << ": components " << p.n_components()
        << ", boxes " << p.cover.boxes.size() << ", measure "
        << fmt(p.measure()) << '\n';
    for (const auto& n : p.notes) log << "  note: " << n << '\n';
  }
  return 0;
}

int cmd_scan(const RunConfig& cfg, std::ostream& log) {
  MapFamily fam = cfg.build_family();
  auto profiles = sweep(fam, cfg.lambdas, cfg.res, cfg.workers);
  ensure_dir(cfg.out_dir);
  const std::uint32_t n_out =
      profiles.empty() ? cfg.res.n_boxes : profiles.front().cover.part.n;
  write_raster(cfg.out_dir + "/raster.chxr",
               raster_of(profiles, n_out, fam.domain));

  std::vector<ExplosionEvent> events;
  if (profiles.size() >= 3) {
    events = detect_explosions(fam, profiles, cfg.detect_settings());
  } else {
    log << "fewer than 3 profiles; detection skipped\n";
  }
  std::ostringstream os;
  for (const auto& ev : events) os << event_json(ev).dump() << '\n';
  write_text(cfg.out_dir + "/events.jsonl", os.str());

  bool unclassified = false;
  for (const auto& ev : events) {
    log << "event lambda0 " << fmt(ev.lambda0) << " x " << fmt(ev.x)
        << " side " << to_string(ev.side) << " cause "
        << to_string(ev.cause) << '\n';
    if (ev.cause == EventCause::unclassified) unclassified = true;
  }
  log << events.size() << " event(s)\n";
  return unclassified ? 3 : 0;
}

int cmd_tangency(const RunConfig& cfg, double lam, std::ostream& log) {
  MapFamily fam = cfg.build_family();
  if (lam < fam.lambda_window.lo || lam > fam.lambda_window.hi) {
    throw ConfigError("lambda outside the family window");
  }
  TangencySearch ts =
      find_tangencies(fam, lam, cfg.period_max, cfg.iterate_cap,
                      cfg.tol_land);
  std::vector<ExplosionPrediction> preds;
  preds.reserve(ts.records.size());
  for (const auto& rec : ts.records) {
    UnstableBranches br =
        compute_branches(fam, rec.lam, rec.x0, rec.period);
    preds.push_back(predict_explosion(fam, rec.lam, rec, br));
  }
  std::ostringstream os;
  export_records_jsonl(os, ts.records, preds);
  ensure_dir(cfg.out_dir);
  write_text(cfg.out_dir + "/records.jsonl", os.str());
  log << os.str();
  for (const auto& n : ts.notes) log << "note: " << n << '\n';
  log << ts.records.size() << " record(s)\n";
  return 0;
}

int cmd_plotdata(const std::string& raster_path, const std::string& out_csv,
                 std::ostream& log) {
  Raster r = read_raster(raster_path);
  std::ostringstream os;
  os << "lambda,box_lo,box_hi\n";
  const double w = (r.domain.hi - r.domain.lo) / double(r.n_boxes);
  for (const auto& row : r.rows) {
    for (const auto& run : row.runs) {
      for (std::uint32_t k = 0; k < run.second; ++k) {
        const std::uint32_t id = run.first + k;
        os << fmt(row.lam) << ',' << fmt(r.domain.lo + id * w) << ','
           << fmt(id + 1 == r.n_boxes ? r.domain.hi
                                      : r.domain.lo + (id + 1) * w)
           << '\n';
      }
    }
  }
  if (out_csv.empty()) {
    log << os.str();
  } else {
    write_text(out_csv, os.str());
  }
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"chain-recurrence and explosion analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, raster_path, out_csv;
  int workers = 0;
  double lam = std::numeric_limits<double>::quiet_NaN();

  CLI::App* chain = app.add_subcommand(
      "chain", "recurrent coverings over the parameter grid");
  chain->add_option("--config", config_path, "run configuration file")
      ->required();
  chain->add_option("--out", out_dir, "output directory override");
  chain->add_option("--workers", workers, "worker count override");

  CLI::App* scan = app.add_subcommand(
      "scan", "sweep, detect explosions, classify causes");
  scan->add_option("--config", config_path, "run configuration file")
      ->required();
  scan->add_option("--out", out_dir, "output directory override");
  scan->add_option("--workers", workers, "worker count override");

  CLI::App* tangency = app.add_subcommand(
      "tangency", "homoclinic records at one parameter value");
  tangency->add_option("--config", config_path, "run configuration file")
      ->required();
  tangency->add_option("--lambda", lam, "parameter value")->required();
  tangency->add_option("--out", out_dir, "output directory override");

  CLI::App* plotdata =
      app.add_subcommand("plotdata", "expand a raster file into CSV");
  plotdata->add_option("raster", raster_path, "raster file")->required();
  plotdata->add_option("--out", out_csv, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (plotdata->parsed()) {
      return cmd_plotdata(raster_path, out_csv, std::cout);
    }
    RunConfig cfg = parse_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (workers > 0) cfg.workers = workers;
    if (chain->parsed()) return cmd_chain(cfg, std::cout);
    if (scan->parsed()) return cmd_scan(cfg, std::cout);
    if (tangency->parsed()) return cmd_tangency(cfg, lam, std::cout);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace chainrec
