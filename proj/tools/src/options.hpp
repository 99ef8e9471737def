#pragma once

// Option registration with a resolved-config echo, the JSON config file
// reader, and JSON output helpers shared by the subcommands.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

namespace spillover::cli {

using Json = nlohmann::ordered_json;

/// Rounded to 1e-9 so reruns print identical text; null when not finite.
Json number(double x);

template <typename T>
Json to_json(const T& value) {
  if constexpr (std::is_floating_point_v<T>) {
    return number(value);
  } else if constexpr (std::is_same_v<T, std::string> || std::is_arithmetic_v<T>) {
    return Json(value);
  } else {
    Json out = Json::array();
    for (const auto& v : value) out.push_back(to_json(v));
    return out;
  }
}

template <typename T>
Json to_json(const std::optional<T>& value) {
  return value ? to_json(*value) : Json(nullptr);
}

/// Registers options on one subcommand and remembers how to echo each
/// resolved value. Bound variables must outlive the set.
class OptionSet {
 public:
  explicit OptionSet(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* option(const std::string& name, T& value, const std::string& help) {
    CLI::Option* o = app_->add_option("--" + name, value, help)->capture_default_str();
    echo_.emplace_back(name, [&value] { return to_json(value); });
    return o;
  }

  template <typename T>
  CLI::Option* positional(const std::string& name, T& value, const std::string& help) {
    CLI::Option* o = app_->add_option(name, value, help);
    echo_.emplace_back(name, [&value] { return to_json(value); });
    return o;
  }

  CLI::Option* flag(const std::string& name, bool& value, const std::string& help);

  /// True when the option came from the command line or the config file.
  bool given(const std::string& name) const;

  Json resolved() const;

  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<Json()>>> echo_;
};

/// Reads a flat JSON object of option values for the selected subcommand.
/// A previously emitted output document is accepted too: its "config" member
/// is used.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  const CLI::App* root_;
};

class Command {
 public:
  explicit Command(CLI::App* app) : opts_(app) {}
  virtual ~Command() = default;
  virtual void run() = 0;
  CLI::App* app() const { return opts_.app(); }

 protected:
  /// {"command": name, "config": resolved options}.
  Json document() const;
  OptionSet opts_;
};

/// Writes `doc` to `path`, or to stdout when the path is empty.
void emit(const Json& doc, const std::string& path);

std::unique_ptr<Command> make_gen_graph(CLI::App& root);
std::unique_ptr<Command> make_cluster(CLI::App& root);
std::unique_ptr<Command> make_metrics(CLI::App& root);
std::unique_ptr<Command> make_assign(CLI::App& root);
std::unique_ptr<Command> make_simulate(CLI::App& root);
std::unique_ptr<Command> make_analyze(CLI::App& root);

}  // namespace spillover::cli
