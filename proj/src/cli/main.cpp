// veechlab CLI: thin shell over the C API. Builds the JSON config from a
// config file plus flag overrides, runs the command, writes artifacts into
// the output directory, prints the result JSON, and exits with the code the
// library suggests (0 pass, 1 failure, 2 config error, 3 contamination).

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "veechlab.h"

namespace {

using nlohmann::json;

int fail_config(const std::string& msg) {
  std::cerr << "veechlab: " << msg << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"veechlab: flat-surface spine projections and their HHS structure"};
  app.set_version_flag("--version", vl_version());

  std::string command;
  std::vector<std::string> names;
  for (const char* const* c = vl_commands(); *c != nullptr; ++c) names.push_back(*c);
  app.add_option("command", command, "one of: " + CLI::detail::join(names, ", "))
      ->required();
  std::string config_path, surface, outdir = ".";
  std::vector<std::string> directions;
  int radius = -1, depth = -1, samples = -1, seed = -1, max_components = -1;
  double sc_len = -1, R = -1;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "JSON config file (flags override it)");
  app.add_option("-s,--surface", surface, "surface JSON file or fixture name");
  app.add_option("-d,--direction", directions, "direction p,q (repeatable)");
  app.add_option("-o,--outdir", outdir, "directory for artifacts")->capture_default_str();
  app.add_option("--radius", radius, "patch development radius");
  app.add_option("--depth", depth, "tree-ball depth");
  app.add_option("--sc-len", sc_len, "saddle connection enumeration bound");
  app.add_option("--samples", samples, "sources per suite target");
  app.add_option("--seed", seed, "RNG seed for sampled checks");
  app.add_option("--R", R, "W-graph distance unit (edges at distance <= 10R)");
  app.add_option("--max-components", max_components, "HHS truncation size");
  app.add_flag("-q,--quiet", quiet, "suppress the report JSON on stdout");
  CLI11_PARSE(app, argc, argv);

  json config = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in.good()) return fail_config("cannot open config '" + config_path + "'");
    try {
      config = json::parse(in);
    } catch (const std::exception& e) {
      return fail_config(std::string("config is not JSON: ") + e.what());
    }
  }
  if (!surface.empty()) config["surface"] = surface;
  if (!directions.empty()) {
    config["directions"] = json::array();
    for (const std::string& d : directions) {
      const auto comma = d.find(',');
      if (comma == std::string::npos) return fail_config("direction must be p,q");
      try {
        config["directions"].push_back(
            {std::stoll(d.substr(0, comma)), std::stoll(d.substr(comma + 1))});
      } catch (const std::exception&) {
        return fail_config("direction must be p,q with integer entries");
      }
    }
  }
  if (radius >= 0) config["radius"] = radius;
  if (depth >= 0) config["depth"] = depth;
  if (sc_len >= 0) config["sc_len"] = sc_len;
  if (samples >= 0) config["samples"] = samples;
  if (seed >= 0) config["seed"] = seed;
  if (R >= 0) config["R"] = R;
  if (max_components >= 0) config["max_components"] = max_components;

  char* out_json = nullptr;
  const int code = vl_run(command.c_str(), config.dump().c_str(), &out_json);
  if (out_json == nullptr) return fail_config("library returned no result");
  json out;
  try {
    out = json::parse(out_json);
  } catch (const std::exception& e) {
    std::cerr << "veechlab: malformed library result: " << e.what() << "\n";
    vl_free(out_json);
    return 2;
  }
  vl_free(out_json);

  if (out.contains("artifacts")) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    for (const auto& [name, content] : out.at("artifacts").items()) {
      std::ofstream f(std::filesystem::path(outdir) / name, std::ios::binary);
      if (!f.good()) return fail_config("cannot write artifact '" + name + "'");
      f << content.get<std::string>();
    }
  }
  if (!quiet) std::cout << out.dump(2) << "\n";
  return code;
}
