#include "borpic/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "borpic/error.hpp"

namespace borpic {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

// strips a trailing comment that is not inside a string
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted && c == '\\') {
      ++i;
      continue;
    }
    if (c == '"') quoted = !quoted;
    if (c == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

class ValueParser {
 public:
  explicit ValueParser(std::string_view s) : s_(s) {}

  std::optional<ConfigValue> parse() {
    skip();
    auto v = value();
    skip();
    if (!v || pos_ != s_.size()) return std::nullopt;
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::optional<ConfigValue> value() {
    if (pos_ >= s_.size()) return std::nullopt;
    char c = s_[pos_];
    if (c == '"') {
      auto str = quoted();
      if (!str) return std::nullopt;
      return ConfigValue{*str};
    }
    if (c == '[') return array();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return ConfigValue{true};
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return ConfigValue{false};
    }
    auto n = number();
    if (!n) return std::nullopt;
    return ConfigValue{*n};
  }

  std::optional<std::string> quoted() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) return std::nullopt;
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: return std::nullopt;
        }
      } else {
        out += c;
      }
    }
    if (pos_ >= s_.size()) return std::nullopt;
    ++pos_;
    return out;
  }

  std::optional<double> number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                s_[pos_] == '.' || s_[pos_] == '+' || s_[pos_] == '-' ||
                                s_[pos_] == '_'))
      ++pos_;
    std::string tok;
    for (char c : s_.substr(start, pos_ - start))
      if (c != '_') tok += c;
    if (tok.empty()) return std::nullopt;
    if (tok.front() == '+') tok.erase(0, 1);
    double v = 0.0;
    auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size()) return std::nullopt;
    return v;
  }

  std::optional<ConfigValue> array() {
    ++pos_;
    ConfigValue::Numbers nums;
    ConfigValue::Strings strs;
    while (true) {
      skip();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        break;
      }
      auto v = value();
      if (!v) return std::nullopt;
      if (v->is_number() && strs.empty())
        nums.push_back(std::get<double>(v->data));
      else if (v->is_string() && nums.empty())
        strs.push_back(std::get<std::string>(v->data));
      else
        return std::nullopt;  // mixed or nested arrays are outside the subset
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        break;
      }
      return std::nullopt;
    }
    if (!strs.empty()) return ConfigValue{strs};
    return ConfigValue{nums};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

const char* kind_name(const ConfigValue& v) {
  switch (v.data.index()) {
    case 0: return "a number";
    case 1: return "a boolean";
    case 2: return "a string";
    default: return "an array";
  }
}

ConfigTable& empty_table() {
  static ConfigTable t;
  return t;
}

}  // namespace

std::optional<ConfigValue> parse_config_value(std::string_view text) {
  return ValueParser(text).parse();
}

const ConfigValue* ConfigTable::find(const std::string& key) const {
  used_.insert(key);
  auto it = values.find(key);
  return it == values.end() ? nullptr : &it->second;
}

void ConfigTable::fail(const std::string& key, const std::string& msg) const {
  auto it = values.find(key);
  int at = it != values.end() ? it->second.line : line;
  std::string where = name.empty() ? key : name + "." + key;
  throw ConfigError(where + ": " + msg, at);
}

double ConfigTable::number(const std::string& key, double fallback) const {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (!v->is_number()) fail(key, std::string("expected a number, got ") + kind_name(*v));
  return std::get<double>(v->data);
}

double ConfigTable::required_number(const std::string& key) const {
  if (!has(key)) {
    used_.insert(key);
    throw ConfigError((name.empty() ? key : name + "." + key) + ": missing required number", line);
  }
  return number(key, 0.0);
}

long ConfigTable::integer(const std::string& key, long fallback) const {
  double v = number(key, static_cast<double>(fallback));
  if (v != static_cast<double>(static_cast<long>(v))) fail(key, "expected an integer");
  return static_cast<long>(v);
}

bool ConfigTable::boolean(const std::string& key, bool fallback) const {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (!std::holds_alternative<bool>(v->data))
    fail(key, std::string("expected a boolean, got ") + kind_name(*v));
  return std::get<bool>(v->data);
}

std::string ConfigTable::string(const std::string& key, const std::string& fallback) const {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (!v->is_string()) fail(key, std::string("expected a string, got ") + kind_name(*v));
  return std::get<std::string>(v->data);
}

std::vector<double> ConfigTable::numbers(const std::string& key,
                                         std::vector<double> fallback) const {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (auto* n = std::get_if<ConfigValue::Numbers>(&v->data)) return *n;
  // an empty array parses as numbers, so strings here are a real mismatch
  fail(key, std::string("expected an array of numbers, got ") + kind_name(*v));
}

std::vector<std::string> ConfigTable::strings(const std::string& key,
                                              std::vector<std::string> fallback) const {
  const ConfigValue* v = find(key);
  if (!v) return fallback;
  if (auto* s = std::get_if<ConfigValue::Strings>(&v->data)) return *s;
  if (auto* n = std::get_if<ConfigValue::Numbers>(&v->data); n && n->empty()) return {};
  fail(key, std::string("expected an array of strings, got ") + kind_name(*v));
}

void ConfigTable::reject_unknown() const {
  for (const auto& [key, value] : values)
    if (!used_.count(key))
      throw ConfigError("unknown key '" + (name.empty() ? key : name + "." + key) + "'", value.line);
}

const ConfigTable& ConfigDocument::section(const std::string& name) const {
  auto it = sections.find(name);
  return it == sections.end() ? empty_table() : it->second;
}

const std::vector<ConfigTable>& ConfigDocument::list(const std::string& name) const {
  static const std::vector<ConfigTable> none;
  auto it = lists.find(name);
  return it == lists.end() ? none : it->second;
}

void ConfigDocument::reject_unknown_sections(const std::set<std::string>& known) const {
  for (const auto& [name, t] : sections)
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]", t.line);
  for (const auto& [name, ts] : lists)
    if (!known.count(name)) throw ConfigError("unknown list [[" + name + "]]", ts.front().line);
}

ConfigDocument parse_config(std::string_view text) {
  ConfigDocument doc;
  ConfigTable* current = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      bool list = line.size() >= 4 && line.substr(0, 2) == "[[";
      std::size_t open = list ? 2 : 1;
      if (line.size() < open * 2 + 1 || line.substr(line.size() - open) != (list ? "]]" : "]"))
        throw ConfigError("malformed table header", line_no);
      std::string name(trim(line.substr(open, line.size() - 2 * open)));
      if (!valid_key(name)) throw ConfigError("bad table name '" + name + "'", line_no);
      if (list) {
        if (doc.sections.count(name))
          throw ConfigError("[[" + name + "]] clashes with a [" + name + "] section", line_no);
        auto& vec = doc.lists[name];
        vec.emplace_back();
        current = &vec.back();
      } else {
        if (doc.sections.count(name) || doc.lists.count(name))
          throw ConfigError("table [" + name + "] defined twice", line_no);
        current = &doc.sections[name];
      }
      current->name = name;
      current->line = line_no;
      if (end == text.size()) break;
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
    std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ConfigError("bad key '" + key + "'", line_no);
    if (!current) throw ConfigError("key '" + key + "' outside any [section]", line_no);
    auto value = parse_config_value(line.substr(eq + 1));
    if (!value) throw ConfigError("cannot parse value of '" + key + "'", line_no);
    value->line = line_no;
    if (!current->values.emplace(key, *value).second)
      throw ConfigError("duplicate key '" + key + "'", line_no);
    if (end == text.size()) break;
  }
  return doc;
}

ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ConfigDocument& doc, std::string_view assignment) {
  std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  std::string path(trim(assignment.substr(0, eq)));
  std::string_view text = trim(assignment.substr(eq + 1));
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  ConfigTable* table = nullptr;
  if (parts.size() == 2 && valid_key(parts[0]) && valid_key(parts[1])) {
    if (doc.lists.count(parts[0]))
      throw ConfigError("override '" + path + "': " + parts[0] + " is a list, use " + parts[0] +
                        ".<index>." + parts[1]);
    table = &doc.sections[parts[0]];
    table->name = parts[0];
  } else if (parts.size() == 3 && valid_key(parts[0]) && valid_key(parts[2])) {
    auto it = doc.lists.find(parts[0]);
    std::size_t index = 0;
    auto [p, ec] = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), index);
    if (it == doc.lists.end() || ec != std::errc() || p != parts[1].data() + parts[1].size() ||
        index >= it->second.size())
      throw ConfigError("override '" + path + "': no such list entry");
    table = &it->second[index];
  } else {
    throw ConfigError("override key '" + path + "' must be section.key or list.index.key");
  }
  auto value = parse_config_value(text);
  ConfigValue v = value ? *value : ConfigValue{std::string(text)};
  v.line = 0;
  table->values[parts.back()] = v;
}

}  // namespace borpic
