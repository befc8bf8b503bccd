#include "coag/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace coag {

std::string version_string() { return "coagfs 0.1.0"; }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_manifest(const std::map<std::string, std::string>& fields) {
  std::ostringstream os;
  os << "# schema: coagfs-csv-1\n";
  os << "# version: " << version_string() << "\n";
  for (const auto& [k, v] : fields) os << "# " << k << ": " << v << "\n";
  return os.str();
}

void write_profile_csv(const std::string& path, const ProfileTable& table,
                       const std::map<std::string, std::string>& extra) {
  std::map<std::string, std::string> m = extra;
  m["lambda"] = format_double(table.lambda);
  m["tol"] = format_double(table.tol);
  if (table.t > 0.0) m["t"] = format_double(table.t);
  switch (table.regime) {
    case ProfileTable::Regime::SmallTime: m["regime"] = "small_time"; break;
    case ProfileTable::Regime::LargeTime: m["regime"] = "large_time"; break;
    case ProfileTable::Regime::FiniteTimeTail: m["regime"] = "finite_time_tail"; break;
  }
  std::ofstream out(path);
  if (!out) throw NumericsError("write_profile_csv: cannot open " + path);
  out << csv_manifest(m);
  out << "abscissa,value";
  if (!table.reference.empty()) out << ",reference,abs_diff";
  out << "\n";
  for (std::size_t i = 0; i < table.abscissae.size(); ++i) {
    out << format_double(table.abscissae[i]) << ","
        << format_double(table.values[i]);
    if (!table.reference.empty()) {
      out << "," << format_double(table.reference[i]) << ","
          << format_double(std::abs(table.values[i] - table.reference[i]));
    }
    out << "\n";
  }
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectoryRow>& rows,
                          const std::map<std::string, std::string>& manifest) {
  std::ofstream out(path);
  if (!out) throw NumericsError("write_trajectory_csv: cannot open " + path);
  out << csv_manifest(manifest);
  out << "t,x,g\n";
  for (const auto& r : rows)
    out << format_double(r.t) << "," << format_double(r.x) << ","
        << format_double(r.g) << "\n";
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NumericsError("parse_config_file: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::map<std::string, std::string> out;
  // JSON object form
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    auto j = nlohmann::json::parse(text);
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_string())
        out[it.key()] = it.value().get<std::string>();
      else
        out[it.key()] = it.value().dump();
    }
    return out;
  }
  // key = value lines (flat TOML subset); '#' starts a comment
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r\"");
      const auto b = s.find_last_not_of(" \t\r\"");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string k = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (!k.empty()) out[k] = v;
  }
  return out;
}

}  // namespace coag
