#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlt/characteristics.hpp"
#include "nlt/diagnostics.hpp"
#include "nlt/grid.hpp"
#include "nlt/kernel.hpp"
#include "nlt/trajectory.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

using json = nlohmann::ordered_json;

/// Shortest decimal form that round-trips the double.
std::string format_double(double v);

/// Columns x_center,value.
void write_profile_csv(const std::filesystem::path& path, const Profile& p);
/// Columns x_center,u,w; node-anchored w is interpolated to the centre.
void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& s, Anchor w_anchor);
/// Columns t,tv_w,tv_u,neg_part.
void write_tv_csv(const std::filesystem::path& path, const TVSeries& s);
/// Columns epsilon,l1_error.
void write_rate_csv(const std::filesystem::path& path, const std::vector<RatePoint>& points);
/// Columns t,X.
void write_path_csv(const std::filesystem::path& path, const CharacteristicPath& p);

json profile_to_json(const Profile& p);
Profile profile_from_json(const json& j);

/// Two-column numeric CSV (header line optional).
std::vector<std::pair<double, double>> read_table_csv(const std::filesystem::path& path);

/// {"family": "exponential" | "uniform" | "triangle" | "piecewise_linear" |
///  "table", "nodes": [[xi, eta], ...], "path": "file.csv", "is_convex": b}.
/// Relative table paths resolve against `base`. Throws ConfigError.
KernelSpec kernel_from_json(const json& j, const std::filesystem::path& base = {});
json kernel_to_json(const KernelSpec& k);

/// {"family": "greenshields" | "table", "samples": [[w, V], ...]}.
VelocityModel velocity_from_json(const json& j);
json velocity_to_json(const VelocityModel& v);

json echo_to_json(const RunEcho& e);

/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace nlt
