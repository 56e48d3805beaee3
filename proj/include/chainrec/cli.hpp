#pragma once
// Command-line front end.  Subcommands:
//   chain     per-parameter recurrent coverings (CSV + raster + summary)
//   scan      sweep, explosion detection, cause classification (JSONL)
//   tangency  homoclinic analysis at one parameter value (JSONL)
//   plotdata  expand a raster into plain CSV rows
// Exit codes: 0 success, 1 config error, 2 numerical failure,
// 3 at least one event left unclassified.

#include <iosfwd>
#include <string>

#include "chainrec/config.hpp"

namespace chainrec {

int cmd_chain(const RunConfig& cfg, std::ostream& log);
int cmd_scan(const RunConfig& cfg, std::ostream& log);
int cmd_tangency(const RunConfig& cfg, double lam, std::ostream& log);
int cmd_plotdata(const std::string& raster_path, const std::string& out_csv,
                 std::ostream& log);

// Full argv entry point used by the binary; maps errors to exit codes.
int run_cli(int argc, const char* const* argv);

}  // namespace chainrec
