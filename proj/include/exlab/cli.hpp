#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace exlab {

inline constexpr const char* kVersion = "0.1.0";

/// Subcommand names in dispatch order.
const std::vector<std::string>& subcommand_names();

/// Parses argv, runs one subcommand and writes its outputs plus
/// manifest.json into the output directory. Returns 0 on success, 2 on
/// usage or validation errors, 3 on runtime errors.
int run_subcommand(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace exlab
