#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "core/jobs.hpp"

using namespace vl;
using jsonio::json;

namespace {

json l3_config() {
  return json{{"surface", "L3"}, {"sc_len", 2.0}};
}

}  // namespace

TEST_CASE("unknown commands and broken configs exit with the config code") {
  json out;
  CHECK(jobs::run("no-such-command", l3_config(), out) == jobs::kConfigError);
  CHECK(out.at("error").at("code") == "ConfigError");

  CHECK(jobs::run("analyze-surface", json::object(), out) == jobs::kConfigError);
  CHECK(jobs::run("analyze-surface", json{{"surface", "missing-fixture"}}, out) ==
        jobs::kConfigError);
  CHECK(jobs::run("analyze-surface",
                  json{{"surface", json{{"n", 2}, {"h", {2, 1}}, {"v", {1, 2}}}}},
                  out) == jobs::kConfigError);  // genus too small
  CHECK(jobs::run("analyze-surface", json{{"surface", "L3"}, {"radius", 0}}, out) ==
        jobs::kConfigError);
}

TEST_CASE("analyze-surface reports the L3 invariants") {
  json out;
  REQUIRE(jobs::run("analyze-surface", l3_config(), out) == jobs::kPass);
  const json& rep = out.at("report");
  CHECK(rep.at("squares") == 3);
  CHECK(rep.at("genus") == 2);
  CHECK(rep.at("singular_points") == 1);
  CHECK(out.at("config").at("sc_len") == 2.0);
  CHECK(out.at("command") == "analyze-surface");
}

TEST_CASE("cylinders and spine agree with the known L3 horizontal data") {
  json out;
  REQUIRE(jobs::run("cylinders", l3_config(), out) == jobs::kPass);
  const json& row = out.at("report").at(0);
  REQUIRE(row.at("cylinders").size() == 2);
  long long circs[2] = {row.at("cylinders").at(0).at("circumference"),
                        row.at("cylinders").at(1).at("circumference")};
  CHECK(std::min(circs[0], circs[1]) == 1);
  CHECK(std::max(circs[0], circs[1]) == 2);
  CHECK(row.at("multitwist").at("shear") == "2");

  REQUIRE(jobs::run("spine", l3_config(), out) == jobs::kPass);
  CHECK(out.at("report").at(0).at("num_components") == 1);
  CHECK(out.at("report").at(0).at("components").at(0).at("rank") == 3);
  CHECK(out.at("artifacts").contains("spine_1_0.dot"));
  const std::string dot = out.at("artifacts").at("spine_1_0.dot");
  CHECK(dot.find("graph spine_1_0") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical results") {
  json a, b;
  REQUIRE(jobs::run("spine", l3_config(), a) == jobs::kPass);
  REQUIRE(jobs::run("spine", l3_config(), b) == jobs::kPass);
  CHECK(a.dump() == b.dump());
}

TEST_CASE("the cell cap environment override wins over the config") {
  json out;
  setenv("VEECHLAB_CELL_CAP", "50", 1);
  const int code = jobs::run("tree-ball", l3_config(), out);
  unsetenv("VEECHLAB_CELL_CAP");
  CHECK(code == jobs::kConfigError);  // 50 cells cannot hold a radius-4 patch
  CHECK(out.at("config").at("cell_cap") == 50);
  CHECK(out.at("error").at("code") == "PatchTooLarge");
}
