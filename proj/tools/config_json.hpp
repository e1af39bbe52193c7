#pragma once

#include <CLI11.hpp>
#include <json.hpp>

// JSON config files for CLI11. Nested objects map to subcommands, so
// {"measure": {"covariance": {"N": 3}}} sets `measure covariance --N 3`.
class ConfigJSON : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  void flatten(const nlohmann::json& j, const std::string& name, std::vector<std::string> parents,
               std::vector<CLI::ConfigItem>& out) const;
};
