#include <cstdio>
#include <fstream>
#include <sstream>

#include "coag/io.hpp"
#include "doctest.h"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing: key=value and JSON forms agree") {
  const std::string kv = "/tmp/coag_cfg_test.toml";
  {
    std::ofstream out(kv);
    out << "# comment line\n";
    out << "lambda = 1.5\n";
    out << "tol = 1e-8   # trailing comment\n";
    out << "out = \"run.csv\"\n";
  }
  const std::string js = "/tmp/coag_cfg_test.json";
  {
    std::ofstream out(js);
    out << R"({"lambda": "1.5", "tol": "1e-8", "out": "run.csv"})";
  }
  auto a = coag::parse_config_file(kv);
  auto b = coag::parse_config_file(js);
  CHECK(a == b);
  CHECK(a.at("lambda") == "1.5");
  CHECK(a.at("out") == "run.csv");
  std::remove(kv.c_str());
  std::remove(js.c_str());
}

TEST_CASE("profile CSV is deterministic and carries the manifest") {
  coag::ProfileTable t;
  t.regime = coag::ProfileTable::Regime::SmallTime;
  t.lambda = 1.5;
  t.t = 0.05;
  t.tol = 1e-8;
  t.abscissae = {0.5, 1.0, 2.0};
  t.values = {0.1, 0.2, 0.3};
  t.reference = {0.11, 0.21, 0.29};
  const std::string p1 = "/tmp/coag_profile_a.csv";
  const std::string p2 = "/tmp/coag_profile_b.csv";
  coag::write_profile_csv(p1, t);
  coag::write_profile_csv(p2, t);
  const std::string s1 = slurp(p1), s2 = slurp(p2);
  CHECK(s1 == s2);  // bit-identical re-render
  CHECK(s1.find("# schema: coagfs-csv-1") != std::string::npos);
  CHECK(s1.find("# lambda: 1.5") != std::string::npos);
  CHECK(s1.find("# regime: small_time") != std::string::npos);
  CHECK(s1.find("abscissa,value,reference,abs_diff") != std::string::npos);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
