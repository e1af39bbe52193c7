#include "config_json.hpp"

namespace {

std::string path_of(const std::vector<std::string>& parents, const std::string& name) {
  std::string p;
  for (const auto& s : parents) p += s + ".";
  return p + name;
}

std::string scalar(const nlohmann::json& j, const std::string& path) {
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw CLI::ConversionError("config: " + path + " must be a scalar");
}

}  // namespace

std::string ConfigJSON::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
  nlohmann::json j;
  for (const CLI::Option* opt : app->get_options({})) {
    if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames()[0];
    if (opt->count() > 0) {
      auto res = opt->results();
      if (res.size() == 1) j[name] = res[0];
      else j[name] = res;
    } else if (default_also && !opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  for (const CLI::App* sub : app->get_subcommands({})) {
    auto inner = nlohmann::json::parse(to_config(sub, default_also, false, ""));
    if (!inner.empty()) j[sub->get_name()] = inner;
  }
  return j.dump(2);
}

std::vector<CLI::ConfigItem> ConfigJSON::from_config(std::istream& input) const {
  nlohmann::json j;
  try {
    input >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw CLI::ConversionError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ConversionError("config: top level must be an object");
  std::vector<CLI::ConfigItem> out;
  for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, it.key(), {}, out);
  return out;
}

void ConfigJSON::flatten(const nlohmann::json& j, const std::string& name, std::vector<std::string> parents,
                         std::vector<CLI::ConfigItem>& out) const {
  if (j.is_object()) {
    // An object names a subcommand; it is also recorded so CLI11 can select it.
    out.emplace_back();
    out.back().parents = parents;
    out.back().name = "++";
    parents.push_back(name);
    out.back().parents = parents;
    for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, it.key(), parents, out);
    out.emplace_back();
    out.back().parents = parents;
    out.back().name = "--";
    return;
  }
  CLI::ConfigItem item;
  item.parents = parents;
  item.name = name;
  const std::string path = path_of(parents, name);
  if (j.is_array()) {
    for (const auto& v : j) item.inputs.push_back(scalar(v, path));
  } else {
    item.inputs = {scalar(j, path)};
  }
  out.push_back(std::move(item));
}
