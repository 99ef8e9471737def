#include "options.hpp"

#include <fstream>
#include <iostream>

#include "spillover/error.hpp"

namespace spillover::cli {

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  const double rounded = std::round(x * 1e9) / 1e9;
  return rounded == 0.0 ? 0.0 : rounded;  // no "-0.0"
}

CLI::Option* OptionSet::flag(const std::string& name, bool& value, const std::string& help) {
  CLI::Option* o = app_->add_flag("--" + name, value, help);
  echo_.emplace_back(name, [&value] { return Json(value); });
  return o;
}

bool OptionSet::given(const std::string& name) const {
  const CLI::Option* o = app_->get_option_no_throw("--" + name);
  return o != nullptr && o->count() > 0;
}

Json OptionSet::resolved() const {
  Json out = Json::object();
  for (const auto& [name, value] : echo_) out[name] = value();
  return out;
}

std::string JsonConfig::to_config(const CLI::App*, bool, bool, std::string) const {
  return "{}\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  Json j = Json::parse(input, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw CLI::ConversionError("--config", "expected a JSON object");
  if (j.contains("config") && j["config"].is_object()) j = j["config"];

  std::vector<std::string> parents;
  const auto selected = root_->get_subcommands();
  if (!selected.empty()) parents.push_back(selected.front()->get_name());

  std::vector<CLI::ConfigItem> items;
  for (const auto& [key, value] : j.items()) {
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    auto text = [&key](const Json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
      if (v.is_number()) return v.dump();
      throw CLI::ConversionError(key, "config values must be scalars or arrays of scalars");
    };
    // Empty lists only echo empty defaults, so both leave the option alone.
    if (value.is_null() || (value.is_array() && value.empty())) continue;
    if (value.is_array()) {
      for (const Json& v : value) item.inputs.push_back(text(v));
    } else {
      item.inputs.push_back(text(value));
    }
    items.push_back(std::move(item));
  }
  return items;
}

Json Command::document() const {
  Json doc = Json::object();
  doc["command"] = app()->get_name();
  doc["config"] = opts_.resolved();
  return doc;
}

void emit(const Json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace spillover::cli
