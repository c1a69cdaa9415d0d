#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace borpic {

// Values of the TOML subset: numbers, booleans, strings and flat arrays.
struct ConfigValue {
  using Numbers = std::vector<double>;
  using Strings = std::vector<std::string>;
  std::variant<double, bool, std::string, Numbers, Strings> data;
  int line = 0;  // 0 for values given as command-line overrides

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
};

// One [section] or one [[list]] entry. Typed getters record which keys were
// read so that leftovers can be reported as unknown.
class ConfigTable {
 public:
  std::string name;
  int line = 0;
  std::map<std::string, ConfigValue> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  const ConfigValue* find(const std::string& key) const;

  double number(const std::string& key, double fallback) const;
  double required_number(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) const;

  // throws ConfigError naming the first key no getter asked for
  void reject_unknown() const;

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

 private:
  mutable std::set<std::string> used_;
};

struct ConfigDocument {
  std::map<std::string, ConfigTable> sections;
  std::map<std::string, std::vector<ConfigTable>> lists;

  // an empty table when the section is absent
  const ConfigTable& section(const std::string& name) const;
  const std::vector<ConfigTable>& list(const std::string& name) const;
  // throws for sections and lists outside `known`
  void reject_unknown_sections(const std::set<std::string>& known) const;
};

ConfigDocument parse_config(std::string_view text);
ConfigDocument load_config(const std::string& path);

// "section.key=value" or "list.index.key=value"; an unparsable value is
// taken as a bare string so that e.g. solver.dt=auto works.
void apply_override(ConfigDocument& doc, std::string_view assignment);

// Parses a single value with the file grammar.
std::optional<ConfigValue> parse_config_value(std::string_view text);

}  // namespace borpic
