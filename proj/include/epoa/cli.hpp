#pragma once

#include <iosfwd>

#include <json.hpp>

#include "epoa/report.hpp"

namespace epoa {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitBidCap = 3,
  kExitZeroRevenue = 4,
};

// Entry point for the `epoa` tool: subcommands synth, curves, epoa, report.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

// Inverse of report_to_json for the fields the tables use.
EpoaReport report_from_json(const nlohmann::json& j);

}  // namespace epoa
