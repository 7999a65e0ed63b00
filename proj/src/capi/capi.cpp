#include "veechlab.h"

#include <cstring>
#include <string>
#include <vector>

#include "core/jobs.hpp"

namespace {

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* vl_version(void) { return "veechlab 1.0.0"; }

const char* const* vl_commands(void) {
  static const std::vector<const char*> names = [] {
    std::vector<const char*> out;
    for (const std::string& name : vl::jobs::commands()) out.push_back(name.c_str());
    out.push_back(nullptr);
    return out;
  }();
  return names.data();
}

int vl_run(const char* command, const char* config_json, char** out_json) {
  if (out_json == nullptr) return vl::jobs::kConfigError;
  *out_json = nullptr;
  try {
    if (command == nullptr || config_json == nullptr)
      throw std::invalid_argument("command and config must be non-null");
    vl::jsonio::json config = vl::jsonio::json::parse(config_json);
    vl::jsonio::json out;
    const int code = vl::jobs::run(command, config, out);
    *out_json = dup_string(out.dump(2) + "\n");
    return code;
  } catch (const std::exception& e) {
    vl::jsonio::json err = {{"command", command ? command : ""},
                            {"exit", vl::jobs::kConfigError},
                            {"error", {{"code", "ConfigError"}, {"message", e.what()}}}};
    *out_json = dup_string(err.dump(2) + "\n");
    return vl::jobs::kConfigError;
  }
}

void vl_free(char* p) { delete[] p; }

}  // extern "C"
