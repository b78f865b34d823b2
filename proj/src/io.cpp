#include "nlt/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "nlt/errors.hpp"

namespace nlt {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::vector<std::pair<double, double>> pairs_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of pairs");
  std::vector<std::pair<double, double>> out;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      throw ConfigError(std::string(what) + " rows must be [x, y] number pairs");
    }
    out.emplace_back(row[0].get<double>(), row[1].get<double>());
  }
  return out;
}

json pairs_to_json(const std::vector<std::pair<double, double>>& v) {
  json a = json::array();
  for (const auto& [x, y] : v) a.push_back({x, y});
  return a;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_profile_csv(const fs::path& path, const Profile& p) {
  auto out = open_out(path);
  out << "x_center,value\n";
  for (std::size_t j = 0; j < p.size(); ++j) {
    out << format_double(p.grid().center(static_cast<std::ptrdiff_t>(j))) << ','
        << format_double(p[j]) << '\n';
  }
}

void write_snapshot_csv(const fs::path& path, const Snapshot& s, Anchor w_anchor) {
  auto out = open_out(path);
  out << "x_center,u,w\n";
  const Grid1D& g = s.u.grid();
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    const double x = g.center(static_cast<std::ptrdiff_t>(j));
    const double w = w_anchor == Anchor::kCenters ? s.w[j] : s.w.interpolate(x, w_anchor);
    out << format_double(x) << ',' << format_double(s.u[j]) << ',' << format_double(w) << '\n';
  }
}

void write_tv_csv(const fs::path& path, const TVSeries& s) {
  auto out = open_out(path);
  out << "t,tv_w,tv_u,neg_part\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << format_double(s.times[i]) << ',' << format_double(s.tv_w[i]) << ','
        << format_double(s.tv_u[i]) << ',' << format_double(s.negative_part[i]) << '\n';
  }
}

void write_rate_csv(const fs::path& path, const std::vector<RatePoint>& points) {
  auto out = open_out(path);
  out << "epsilon,l1_error\n";
  for (const auto& p : points) out << format_double(p.epsilon) << ',' << format_double(p.error) << '\n';
}

void write_path_csv(const fs::path& path, const CharacteristicPath& p) {
  auto out = open_out(path);
  out << "t,X\n";
  for (const auto& s : p.samples) out << format_double(s.t) << ',' << format_double(s.x) << '\n';
}

json profile_to_json(const Profile& p) {
  const Grid1D& g = p.grid();
  json j;
  j["x_left"] = g.x_left;
  j["cell_width"] = g.cell_width;
  j["boundary_left"] = g.boundary_left;
  j["boundary_right"] = g.boundary_right;
  j["values"] = std::vector<double>(p.values().begin(), p.values().end());
  return j;
}

Profile profile_from_json(const json& j) {
  try {
    Grid1D g;
    g.x_left = j.at("x_left").get<double>();
    g.cell_width = j.at("cell_width").get<double>();
    g.boundary_left = j.at("boundary_left").get<double>();
    g.boundary_right = j.at("boundary_right").get<double>();
    auto values = j.at("values").get<std::vector<double>>();
    g.n_cells = values.size();
    g.validate();
    return Profile(g, std::move(values));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed profile: ") + e.what());
  }
}

std::vector<std::pair<double, double>> read_table_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read table " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a >> b)) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    rows.emplace_back(a, b);
  }
  if (rows.size() < 2) throw ConfigError(path.string() + ": table needs at least two rows");
  return rows;
}

KernelSpec kernel_from_json(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("kernel must be an object");
  const std::string family = j.value("family", "");
  try {
    if (family == "exponential") return KernelSpec::exponential();
    if (family == "uniform") return KernelSpec::uniform();
    if (family == "triangle") return KernelSpec::triangle();
    if (family == "piecewise_linear") {
      if (!j.contains("nodes")) throw ConfigError("piecewise_linear kernel needs nodes");
      return KernelSpec::piecewise_linear(pairs_from_json(j["nodes"], "kernel nodes"),
                                          j.value("is_convex", false));
    }
    if (family == "table") {
      std::vector<std::pair<double, double>> rows;
      if (j.contains("nodes")) {
        rows = pairs_from_json(j["nodes"], "kernel nodes");
      } else if (j.contains("path")) {
        fs::path p = j["path"].get<std::string>();
        if (p.is_relative() && !base.empty()) p = base / p;
        rows = read_table_csv(p);
      } else {
        throw ConfigError("table kernel needs nodes or path");
      }
      return KernelSpec::from_table(j.value("name", "table"), std::move(rows),
                                    j.value("is_convex", false));
    }
  } catch (const InvalidKernel& e) {
    throw ConfigError(std::string("invalid kernel: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed kernel: ") + e.what());
  }
  throw ConfigError("unknown kernel family '" + family + "'");
}

json kernel_to_json(const KernelSpec& k) {
  json j;
  switch (k.family()) {
    case KernelFamily::kExponential:
    case KernelFamily::kUniform:
      j["family"] = k.name();
      break;
    case KernelFamily::kPiecewiseLinear:
      if (k.name() == "triangle") {
        j["family"] = "triangle";
      } else {
        j["family"] = "piecewise_linear";
        j["nodes"] = pairs_to_json(k.nodes());
        j["is_convex"] = k.is_convex();
      }
      break;
    case KernelFamily::kCustom:
      if (k.nodes().empty()) {
        j["family"] = "custom";
        j["name"] = k.name();
      } else {
        j["family"] = "table";
        j["name"] = k.name();
        j["nodes"] = pairs_to_json(k.nodes());
        j["is_convex"] = k.is_convex();
      }
      break;
  }
  return j;
}

VelocityModel velocity_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("velocity must be an object");
  const std::string family = j.value("family", "");
  if (family == "greenshields") return VelocityModel::greenshields();
  if (family == "table") {
    if (!j.contains("samples")) throw ConfigError("table velocity needs samples");
    try {
      return VelocityModel::from_table(pairs_from_json(j["samples"], "velocity samples"));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("invalid velocity table: ") + e.what());
    }
  }
  throw ConfigError("unknown velocity family '" + family + "'");
}

json velocity_to_json(const VelocityModel& v) {
  json j;
  if (v.family() == VelocityFamily::kGreenshields) {
    j["family"] = "greenshields";
  } else if (!v.table().empty()) {
    j["family"] = "table";
    j["samples"] = pairs_to_json(v.table());
  } else {
    j["family"] = "custom";
    j["name"] = v.name();
  }
  return j;
}

json echo_to_json(const RunEcho& e) {
  json j;
  j["kind"] = e.kind;
  j["scheme"] = e.scheme;
  if (!e.kernel.empty()) j["kernel"] = e.kernel;
  j["velocity"] = e.velocity;
  if (e.kind == "nonlocal") j["epsilon"] = e.epsilon;
  j["cell_width"] = e.cell_width;
  j["dt"] = e.dt_cfl;
  j["cfl"] = e.cfl;
  j["t_end"] = e.t_end;
  if (e.kind == "nonlocal") j["kernel_cells"] = e.kernel_cells;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace nlt
