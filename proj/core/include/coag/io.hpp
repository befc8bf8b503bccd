#pragma once

#include <map>
#include <string>
#include <vector>

#include "coag/fundamental_solution.hpp"
#include "coag/types.hpp"

namespace coag {

/// Version string embedded in every output manifest.
std::string version_string();

/// Deterministic double formatting used in data files: shortest round-trip
/// decimal representation.
std::string format_double(double v);

/// Manifest header lines of the form "# key: value" prepended to CSV files.
std::string csv_manifest(const std::map<std::string, std::string>& fields);

/// Write a profile table as CSV with a manifest header.
void write_profile_csv(const std::string& path, const ProfileTable& table,
                       const std::map<std::string, std::string>& extra = {});

/// Write a trajectory-style CSV with columns (t, x, g).
struct TrajectoryRow {
  double t, x, g;
};
void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectoryRow>& rows,
                          const std::map<std::string, std::string>& manifest);

/// Flat key=value config file parser (also accepts a JSON object); values are
/// returned as strings and converted by the caller.
std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace coag
