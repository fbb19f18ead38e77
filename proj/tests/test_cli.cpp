#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "cforge/cli.hpp"

using namespace cforge;

namespace {

std::string read_config(const std::string& name) {
  std::ifstream in(std::string(CFORGE_CONFIG_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const CsvTable* table(const CommandOutput& out, const std::string& name) {
  for (const auto& [n, t] : out.tables)
    if (n == name) return &t;
  return nullptr;
}

Rational q(long n, long d) { return Rational(n) / Rational(d); }

}  // namespace

TEST_CASE("config hash and version are embedded") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
  const std::string text = read_config("classify.json");
  const auto out = run_command("classify", text);
  CHECK(out.report.at("config_hash") == fnv1a64_hex(text));
  CHECK(out.report.at("version") == kVersion);
  CHECK(out.exit_code == 0);
}

TEST_CASE("classify rows match the library") {
  const auto out = run_command("classify", read_config("classify.json"));
  REQUIRE(out.exit_code == 0);
  const auto cfg = Json::parse(read_config("classify.json"));
  const auto ms = matrices_from_json(cfg.at("matrices"));
  const auto& rows = out.report.at("result").at("rows");
  REQUIRE(rows.size() == ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const char* cls = classify(ms[i]) == MatClass::Elliptic ? "Elliptic"
                      : classify(ms[i]) == MatClass::Parabolic ? "Parabolic"
                                                               : "Hyperbolic";
    CHECK(rows[i].at("class") == cls);
    CHECK(rows[i].at("spectral_radius").get<double>() == spectral_radius(ms[i]));
  }
  CHECK(rows[0].at("class") == "Elliptic");
  CHECK(rows[2].at("class") == "Hyperbolic");
  CHECK(rows[2].at("spectral_radius").get<double>() == doctest::Approx(2.0));
  REQUIRE(table(out, "classify"));
  CHECK(table(out, "classify")->rows.size() == ms.size());
}

TEST_CASE("exponent on constant cocycles") {
  const auto h = run_command(
      "exponent", R"({"cocycle": {"cells": [{"diag": 2}]}, "dynamics": {"rotation": "1/4"}, "k_max": 4})");
  REQUIRE(h.exit_code == 0);
  const auto* t = table(h, "exponent");
  REQUIRE(t);
  for (const auto& row : t->rows)
    if (row[0] != "le_periodic") CHECK(std::stod(row[1]) == doctest::Approx(std::log(2.0)));
  const auto e = run_command(
      "exponent", R"({"cocycle": {"cells": [{"rotation": "1/3"}]}, "dynamics": {"rotation": "1/4"}, "k_max": 4})");
  REQUIRE(e.exit_code == 0);
  CHECK(e.report.at("result").at("le_periodic").at("value").get<double>() == doctest::Approx(0.0));
  const auto demo = run_command("exponent", read_config("exponent.json"));
  REQUIRE(demo.exit_code == 0);
  const StepCocycle a = cocycle_from_json(Json::parse(read_config("exponent.json")).at("cocycle"));
  CHECK(demo.report.at("result").at("le_periodic").at("value").get<double>() ==
        le_periodic(a, Iet::rotation(q(1, 64))).value);
  CHECK(table(demo, "exponent_long"));
  CHECK(table(demo, "probe"));
}

TEST_CASE("certify commands") {
  const auto c = run_command("certify", read_config("certify.json"));
  REQUIRE(c.exit_code == 0);
  CHECK(c.report.at("result").at("status") == "CertifiedUH");
  const auto r = run_command("certify", read_config("certify_counterexample.json"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.report.at("result").at("status") == "CounterexampleWord");
}

TEST_CASE("lower commands") {
  const auto d = run_command("lower", read_config("lower_discrete.json"));
  REQUIRE(d.exit_code == 0);
  CHECK(d.report.at("result").at("targets_met") == true);
  CHECK(d.report.at("result").at("le_after").get<double>() < 0.05);
  CHECK(table(d, "trace"));
  CHECK(table(d, "exponent_trace"));
  const Iet tt = iet_from_json(d.report.at("result").at("t_tilde"));
  CHECK(weak_distance(tt, Iet::rotation(q(1, 64))) < q(1, 8));
  const auto g = run_command("lower", read_config("lower_degenerate.json"));
  REQUIRE(g.exit_code == 0);
  CHECK(g.report.at("result").at("le_after").get<double>() == 0.0);
  const auto m = run_command("lower", read_config("lower_missing_evidence.json"));
  CHECK(m.exit_code == 2);
  CHECK(m.report.at("status") == "error");
  CHECK(m.report.at("error").at("kind") == "RichnessEvidenceMissing");
  CHECK(m.tables.empty());
}

TEST_CASE("scan commands") {
  const auto l = run_command("scan", read_config("scan_liouville.json"));
  REQUIRE(l.exit_code == 0);
  CHECK(l.report.at("result").at("hit").at("n") == 1);
  const auto a = run_command("scan", read_config("scan_avila.json"));
  REQUIRE(a.exit_code == 0);
  CHECK(a.report.at("result").at("hits") == a.report.at("result").at("attempts"));
  const auto f = run_command("scan", read_config("scan_frequency.json"));
  REQUIRE(f.exit_code == 0);
  CHECK(f.report.at("result").at("words").get<std::size_t>() > 0);
  const auto e = run_command("scan", read_config("scan_frequency_empty.json"));
  REQUIRE(e.exit_code == 0);
  CHECK(e.report.at("result").at("words") == 0);
  const auto* honesty = table(e, "frequency");
  REQUIRE(honesty);
  REQUIRE(honesty->rows.size() == 1);
  CHECK(honesty->rows[0][3] == "no word satisfies the constraints");
  const auto r = run_command("scan", read_config("scan_richness.json"));
  REQUIRE(r.exit_code == 0);
  CHECK(table(r, "richness"));
  const auto b = run_command("scan", read_config("scan_budget_error.json"));
  CHECK(b.exit_code == 3);
  CHECK(b.report.at("error").at("kind") == "BudgetExceeded");
}

TEST_CASE("error exit codes") {
  CHECK(run_command("classify", "{not json").exit_code == 1);
  CHECK(run_command("classify", R"({"matrices": [[1, 2, 3]]})").exit_code == 1);
  CHECK(run_command("lower", read_config("classify.json")).exit_code == 1);
  CHECK(run_command("scan", R"({"mode": "avila", "count": 3})").exit_code == 1);
  CHECK(exit_code_for(ErrorKind::NoEllipticWord) == 2);
  CHECK(exit_code_for(ErrorKind::BudgetExceeded) == 3);
  CHECK(exit_code_for(ErrorKind::SizeOverflow) == 3);
  CHECK(exit_code_for(ErrorKind::InternalCheckFailed) == 1);
}

TEST_CASE("csv formatting") {
  CsvTable t{{"a", "b"}, {}};
  t.add({"plain", "with,comma"});
  t.add({"quote\"d", "line\nbreak"});
  CHECK(t.str() == "a,b\r\nplain,\"with,comma\"\r\n\"quote\"\"d\",\"line\nbreak\"\r\n");
  CHECK(csv_field("x") == "x");
}

TEST_CASE("iet json roundtrip is exact") {
  const Iet t = iet_from_permutation(7, {3, 6, 0, 2, 5, 1, 4}).map;
  const Json j = to_json(t);
  CHECK(iet_from_json(j) == t);
  CHECK(iet_from_json(Json::parse(j.dump())) == t);
  const Iet r = Iet::rotation(q(2, 7));
  CHECK(to_json(iet_from_json(to_json(r))).dump() == to_json(r).dump());
}
