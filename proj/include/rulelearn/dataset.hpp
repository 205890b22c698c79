#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace rulelearn {

/// Cells are stored as doubles; nominal cells hold the symbol index, missing cells hold NaN.
inline constexpr double missing_value = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double value) { return std::isnan(value); }

enum class AttributeKind { nominal, numeric };
enum class Role { regular, label, survival_time };
enum class Task { classification, regression, survival };

inline std::string_view to_string(Task task) {
  switch (task) {
    case Task::classification: return "classification";
    case Task::regression: return "regression";
    case Task::survival: return "survival";
  }
  return "unknown";
}

inline std::string_view to_string(Role role) {
  switch (role) {
    case Role::regular: return "regular";
    case Role::label: return "label";
    case Role::survival_time: return "survival_time";
  }
  return "unknown";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  /// 1-based line number of the offending input line, 0 when not line-specific.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class RoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttributeMeta {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  std::vector<std::string> domain;  // nominal only, closed after load
  Role role = Role::regular;

  bool is_nominal() const { return kind == AttributeKind::nominal; }
  bool is_numeric() const { return kind == AttributeKind::numeric; }

  std::optional<std::size_t> symbol_index(std::string_view symbol) const {
    auto it = std::find(domain.begin(), domain.end(), symbol);
    if (it == domain.end()) return std::nullopt;
    return static_cast<std::size_t>(it - domain.begin());
  }

  bool operator==(const AttributeMeta&) const = default;
};

/// Immutable columnar table of examples.
class DataSet {
 public:
  DataSet() = default;

  DataSet(std::string relation, std::vector<AttributeMeta> attributes,
          std::vector<std::vector<double>> columns)
      : relation_(std::move(relation)), attributes_(std::move(attributes)), columns_(std::move(columns)) {
    validate();
  }

  const std::string& relation() const { return relation_; }
  std::size_t size() const { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t attribute_count() const { return attributes_.size(); }
  std::span<const AttributeMeta> attributes() const { return attributes_; }
  const AttributeMeta& attribute(std::size_t index) const { return attributes_.at(index); }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
      if (attributes_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::span<const double> column(std::size_t attribute) const { return columns_.at(attribute); }
  double value(std::size_t row, std::size_t attribute) const { return columns_[attribute][row]; }

  std::optional<std::size_t> label_index() const { return index_of_role(Role::label); }
  std::optional<std::size_t> survival_index() const { return index_of_role(Role::survival_time); }
  bool has_label() const { return label_index().has_value(); }

  Task task() const {
    auto label = label_index();
    if (!label) throw RoleError("dataset has no label attribute");
    if (survival_index()) return Task::survival;
    return attributes_[*label].is_nominal() ? Task::classification : Task::regression;
  }

  const AttributeMeta& label_attribute() const { return attributes_[require_label()]; }
  std::span<const double> labels() const { return columns_[require_label()]; }
  std::span<const double> survival_times() const {
    auto index = survival_index();
    if (!index) throw RoleError("dataset has no survival_time attribute");
    return columns_[*index];
  }

  /// Attributes usable in rule premises.
  std::vector<std::size_t> regular_attributes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
      if (attributes_[i].role == Role::regular) out.push_back(i);
    }
    return out;
  }

  DataSet subset(std::span<const std::size_t> rows) const {
    std::vector<std::vector<double>> columns(columns_.size());
    for (std::size_t a = 0; a < columns_.size(); ++a) {
      columns[a].reserve(rows.size());
      for (auto r : rows) columns[a].push_back(columns_[a].at(r));
    }
    DataSet out;
    out.relation_ = relation_;
    out.attributes_ = attributes_;
    out.columns_ = std::move(columns);
    return out;
  }

  bool operator==(const DataSet& other) const {
    if (relation_ != other.relation_ || attributes_ != other.attributes_) return false;
    if (columns_.size() != other.columns_.size()) return false;
    for (std::size_t a = 0; a < columns_.size(); ++a) {
      if (columns_[a].size() != other.columns_[a].size()) return false;
      for (std::size_t r = 0; r < columns_[a].size(); ++r) {
        double x = columns_[a][r], y = other.columns_[a][r];
        if (is_missing(x) != is_missing(y)) return false;
        if (!is_missing(x) && x != y) return false;
      }
    }
    return true;
  }

 private:
  friend DataSet set_role(DataSet ds, std::string_view name, Role role);

  std::optional<std::size_t> index_of_role(Role role) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
      if (attributes_[i].role == role) return i;
    }
    return std::nullopt;
  }

  std::size_t require_label() const {
    auto label = label_index();
    if (!label) throw RoleError("dataset has no label attribute");
    return *label;
  }

  void validate() const {
    if (columns_.size() != attributes_.size()) {
      throw SchemaError("column count does not match attribute count");
    }
    std::unordered_set<std::string> names;
    std::size_t labels = 0, survival = 0;
    for (std::size_t a = 0; a < attributes_.size(); ++a) {
      const auto& meta = attributes_[a];
      if (!names.insert(meta.name).second) throw SchemaError("duplicate attribute name '" + meta.name + "'");
      if (columns_[a].size() != size()) throw SchemaError("ragged columns");
      if (meta.is_nominal()) {
        std::unordered_set<std::string_view> symbols;
        for (const auto& s : meta.domain) {
          if (s.empty()) throw SchemaError("empty nominal symbol in '" + meta.name + "'");
          if (!symbols.insert(s).second) throw SchemaError("duplicate symbol '" + s + "' in '" + meta.name + "'");
        }
        for (double v : columns_[a]) {
          if (is_missing(v)) continue;
          if (v < 0 || v != std::floor(v) || v >= static_cast<double>(meta.domain.size())) {
            throw SchemaError("nominal cell outside domain of '" + meta.name + "'");
          }
        }
      } else if (!meta.domain.empty()) {
        throw SchemaError("numeric attribute '" + meta.name + "' has a domain");
      }
      if (meta.role == Role::label) ++labels;
      if (meta.role == Role::survival_time) ++survival;
    }
    if (labels > 1) throw RoleError("more than one label attribute");
    if (survival > 1) throw RoleError("more than one survival_time attribute");
    if (auto label = label_index()) {
      for (double v : columns_[*label]) {
        if (is_missing(v)) throw RoleError("label '" + attributes_[*label].name + "' has missing values");
      }
    }
    if (auto time = survival_index()) {
      const auto& meta = attributes_[*time];
      if (!meta.is_numeric()) throw RoleError("survival_time '" + meta.name + "' must be numeric");
      for (double v : columns_[*time]) {
        if (is_missing(v) || v < 0) {
          throw RoleError("survival_time '" + meta.name + "' must be non-negative and never missing");
        }
      }
      if (auto label = label_index()) {
        const auto& event = attributes_[*label];
        if (!event.is_nominal() || event.domain != std::vector<std::string>{"0", "1"}) {
          throw RoleError("event indicator '" + event.name + "' must have domain {0,1}");
        }
      }
    }
  }

  std::string relation_;
  std::vector<AttributeMeta> attributes_;
  std::vector<std::vector<double>> columns_;
};

/// Returns a copy of `ds` with the role of `name` changed. A numeric 0/1 column or a nominal
/// column over {0,1} becomes the canonical event indicator when a survival_time role is present.
inline DataSet set_role(DataSet ds, std::string_view name, Role role) {
  auto index = ds.find(name);
  if (!index) throw RoleError("unknown attribute '" + std::string(name) + "'");
  auto& meta = ds.attributes_[*index];
  if (role == Role::label) {
    auto existing = ds.label_index();
    if (existing && *existing != *index) {
      throw RoleError("attribute '" + ds.attributes_[*existing].name + "' already has the label role");
    }
  }
  if (role == Role::survival_time) {
    if (!meta.is_numeric()) throw RoleError("survival_time '" + meta.name + "' must be numeric");
    auto existing = ds.survival_index();
    if (existing && *existing != *index) {
      throw RoleError("attribute '" + ds.attributes_[*existing].name + "' already has the survival_time role");
    }
  }
  meta.role = role;

  auto label = ds.label_index();
  if (label && ds.survival_index()) {
    auto& event = ds.attributes_[*label];
    auto& column = ds.columns_[*label];
    std::vector<double> recoded(column.size());
    for (std::size_t r = 0; r < column.size(); ++r) {
      double v = column[r];
      if (is_missing(v)) throw RoleError("event indicator '" + event.name + "' has missing values");
      std::string_view symbol;
      std::string numeric_text;
      if (event.is_nominal()) {
        symbol = event.domain[static_cast<std::size_t>(v)];
      } else {
        if (v == 0.0) symbol = "0";
        else if (v == 1.0) symbol = "1";
        else symbol = "?";
      }
      if (symbol == "0") recoded[r] = 0.0;
      else if (symbol == "1") recoded[r] = 1.0;
      else throw RoleError("event indicator '" + event.name + "' has values outside {0,1}");
    }
    event.kind = AttributeKind::nominal;
    event.domain = {"0", "1"};
    column = std::move(recoded);
  }
  ds.validate();
  return ds;
}

/// True when both datasets describe the same attributes (names, kinds, domains), ignoring roles.
inline bool same_schema(std::span<const AttributeMeta> a, std::span<const AttributeMeta> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].kind != b[i].kind || a[i].domain != b[i].domain) return false;
  }
  return true;
}

/// Re-expresses `data` in the attribute layout of `schema` (matched by name). Nominal symbols
/// unseen in the schema's closed domain become missing; an unseen label symbol is an error.
/// With `allow_missing_targets`, absent label and survival-time columns are filled with
/// placeholder zeros (prediction-only input).
inline DataSet conform_to(const DataSet& data, std::span<const AttributeMeta> schema,
                          bool allow_missing_targets = false) {
  std::vector<std::vector<double>> columns;
  std::vector<AttributeMeta> attributes(schema.begin(), schema.end());
  columns.reserve(schema.size());
  for (const auto& meta : schema) {
    auto source = data.find(meta.name);
    if (!source && allow_missing_targets && meta.role != Role::regular) {
      columns.emplace_back(data.size(), 0.0);
      continue;
    }
    if (!source) throw SchemaError("attribute '" + meta.name + "' not present in data");
    const auto& source_meta = data.attribute(*source);
    auto column = data.column(*source);
    std::vector<double> out(column.begin(), column.end());
    if (meta.is_nominal()) {
      if (source_meta.is_nominal()) {
        std::vector<double> remap(source_meta.domain.size(), missing_value);
        for (std::size_t s = 0; s < source_meta.domain.size(); ++s) {
          if (auto idx = meta.symbol_index(source_meta.domain[s])) remap[s] = static_cast<double>(*idx);
        }
        for (auto& v : out) {
          if (!is_missing(v)) v = remap[static_cast<std::size_t>(v)];
        }
      } else {
        for (auto& v : out) {
          if (is_missing(v)) continue;
          std::ostringstream text;
          text << v;
          auto idx = meta.symbol_index(text.str());
          v = idx ? static_cast<double>(*idx) : missing_value;
        }
      }
      if (meta.role == Role::label) {
        for (std::size_t r = 0; r < out.size(); ++r) {
          if (is_missing(out[r]) && !is_missing(column[r])) {
            throw SchemaError("label value in row " + std::to_string(r + 1) + " is not in the training domain");
          }
        }
      }
    } else if (source_meta.is_nominal()) {
      throw SchemaError("attribute '" + meta.name + "' is nominal in data but numeric in schema");
    }
    columns.push_back(std::move(out));
  }
  return DataSet(data.relation(), std::move(attributes), std::move(columns));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

inline std::optional<double> parse_real(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

/// Splits one delimited line, honouring single or double quotes. Returns trimmed, unquoted fields.
inline std::vector<std::string> split_fields(std::string_view line, char delimiter, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  char quote = 0;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == '\\' && i + 1 < line.size()) {
        current += line[++i];
      } else if (c == quote) {
        if (quote == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quote = 0;
        }
      } else {
        current += c;
      }
    } else if ((c == '"' || c == '\'') && trim(current).empty()) {
      current.clear();
      quote = c;
      was_quoted = true;
    } else if (c == delimiter) {
      fields.push_back(was_quoted ? current : std::string(trim(current)));
      current.clear();
      was_quoted = false;
    } else if (!(was_quoted && (c == ' ' || c == '\t'))) {
      current += c;
    }
  }
  if (quote) throw ParseError("unterminated quote", line_no);
  fields.push_back(was_quoted ? current : std::string(trim(current)));
  return fields;
}

inline std::string quote_arff(const std::string& s) {
  bool needs = s.empty() || s == "?" ||
               s.find_first_of(" \t,{}'\"%\\") != std::string::npos;
  if (!needs) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

inline std::string format_real(double v) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ptr);
}

}  // namespace detail

/// Reads the ARFF subset: @relation, numeric / nominal @attribute declarations, dense @data,
/// '?' for missing cells and '%' comment lines.
inline DataSet parse_arff(std::istream& in) {
  std::string relation;
  std::vector<AttributeMeta> attributes;
  std::vector<std::vector<double>> columns;
  bool in_data = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '%') continue;
    if (!in_data) {
      if (line.front() != '@') throw ParseError("expected a declaration", line_no);
      auto space = line.find_first_of(" \t");
      auto keyword = line.substr(0, space);
      auto rest = space == std::string_view::npos ? std::string_view{} : detail::trim(line.substr(space));
      if (detail::iequals(keyword, "@relation")) {
        auto fields = detail::split_fields(rest, '\0', line_no);
        relation = fields.empty() ? std::string{} : fields.front();
      } else if (detail::iequals(keyword, "@attribute")) {
        AttributeMeta meta;
        std::string_view type;
        if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
          char q = rest.front();
          std::size_t end = 1;
          while (end < rest.size() && rest[end] != q) end += rest[end] == '\\' ? 2 : 1;
          if (end >= rest.size()) throw ParseError("unterminated attribute name", line_no);
          meta.name = detail::split_fields(rest.substr(0, end + 1), '\0', line_no).front();
          type = detail::trim(rest.substr(end + 1));
        } else {
          auto sep = rest.find_first_of(" \t{");
          if (sep == std::string_view::npos) throw ParseError("attribute type missing", line_no);
          meta.name = std::string(rest.substr(0, sep));
          type = detail::trim(rest.substr(sep));
        }
        if (meta.name.empty()) throw ParseError("empty attribute name", line_no);
        if (!type.empty() && type.front() == '{') {
          auto close = type.rfind('}');
          if (close == std::string_view::npos) throw ParseError("unterminated nominal domain", line_no);
          meta.kind = AttributeKind::nominal;
          for (auto& s : detail::split_fields(type.substr(1, close - 1), ',', line_no)) {
            if (s.empty()) throw ParseError("empty nominal symbol", line_no);
            if (meta.symbol_index(s)) throw ParseError("duplicate nominal symbol '" + s + "'", line_no);
            meta.domain.push_back(s);
          }
        } else if (detail::iequals(type, "numeric") || detail::iequals(type, "real") ||
                   detail::iequals(type, "integer")) {
          meta.kind = AttributeKind::numeric;
        } else {
          throw ParseError("unknown attribute type '" + std::string(type) + "'", line_no);
        }
        for (const auto& other : attributes) {
          if (other.name == meta.name) throw ParseError("duplicate attribute '" + meta.name + "'", line_no);
        }
        attributes.push_back(std::move(meta));
      } else if (detail::iequals(keyword, "@data")) {
        if (attributes.empty()) throw ParseError("@data before any @attribute", line_no);
        in_data = true;
        columns.assign(attributes.size(), {});
      } else {
        throw ParseError("unknown declaration '" + std::string(keyword) + "'", line_no);
      }
      continue;
    }
    if (line.front() == '{') throw ParseError("sparse data rows are not supported", line_no);
    auto fields = detail::split_fields(line, ',', line_no);
    if (fields.size() != attributes.size()) {
      throw ParseError("expected " + std::to_string(attributes.size()) + " values, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t a = 0; a < attributes.size(); ++a) {
      const auto& cell = fields[a];
      double v = missing_value;
      if (cell != "?") {
        if (attributes[a].is_nominal()) {
          auto idx = attributes[a].symbol_index(cell);
          if (!idx) {
            throw ParseError("undeclared symbol '" + cell + "' for attribute '" + attributes[a].name + "'", line_no);
          }
          v = static_cast<double>(*idx);
        } else {
          auto parsed = detail::parse_real(cell);
          if (!parsed) throw ParseError("invalid number '" + cell + "'", line_no);
          v = *parsed;
        }
      }
      columns[a].push_back(v);
    }
  }
  if (!in_data) throw ParseError("missing @data section", 0);
  return DataSet(relation, std::move(attributes), std::move(columns));
}

inline DataSet load_arff(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return parse_arff(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

inline void write_arff(const DataSet& ds, std::ostream& out) {
  out << "@relation " << detail::quote_arff(ds.relation().empty() ? "data" : ds.relation()) << "\n\n";
  for (const auto& meta : ds.attributes()) {
    out << "@attribute " << detail::quote_arff(meta.name) << ' ';
    if (meta.is_nominal()) {
      out << '{';
      for (std::size_t s = 0; s < meta.domain.size(); ++s) {
        out << (s ? "," : "") << detail::quote_arff(meta.domain[s]);
      }
      out << "}\n";
    } else {
      out << "numeric\n";
    }
  }
  out << "\n@data\n";
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
      if (a) out << ',';
      double v = ds.value(r, a);
      if (is_missing(v)) out << '?';
      else if (ds.attribute(a).is_nominal()) out << detail::quote_arff(ds.attribute(a).domain[static_cast<std::size_t>(v)]);
      else out << detail::format_real(v);
    }
    out << '\n';
  }
}

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
};

/// Reads a rectangular delimited table. A column is numeric when every non-missing cell parses
/// as a real number, otherwise nominal with symbols in order of first appearance. Empty cells
/// and '?' are missing.
inline DataSet parse_csv(std::istream& in, const CsvOptions& options = {}, std::string relation = {}) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> names;
  std::string raw;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  while (std::getline(in, raw)) {
    ++line_no;
    if (detail::trim(raw).empty()) continue;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto fields = detail::split_fields(raw, options.delimiter, line_no);
    if (header_pending) {
      names = std::move(fields);
      header_pending = false;
      continue;
    }
    std::size_t expected = names.empty() ? (rows.empty() ? fields.size() : rows.front().size()) : names.size();
    if (fields.size() != expected) {
      throw ParseError("ragged row: expected " + std::to_string(expected) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    rows.push_back(std::move(fields));
    line_numbers.push_back(line_no);
  }
  if (names.empty() && rows.empty()) throw ParseError("empty file", 0);
  std::size_t width = names.empty() ? rows.front().size() : names.size();
  if (names.empty()) {
    for (std::size_t a = 0; a < width; ++a) names.push_back("att" + std::to_string(a + 1));
  }
  std::vector<AttributeMeta> attributes(width);
  std::vector<std::vector<double>> columns(width, std::vector<double>(rows.size(), missing_value));
  for (std::size_t a = 0; a < width; ++a) {
    auto& meta = attributes[a];
    meta.name = names[a];
    if (meta.name.empty()) throw ParseError("empty column name in header", 1);
    for (std::size_t b = 0; b < a; ++b) {
      if (names[b] == meta.name) throw ParseError("duplicate column name '" + meta.name + "'", 1);
    }
    bool numeric = true;
    for (const auto& row : rows) {
      const auto& cell = row[a];
      if (cell.empty() || cell == "?") continue;
      if (!detail::parse_real(cell)) {
        numeric = false;
        break;
      }
    }
    meta.kind = numeric ? AttributeKind::numeric : AttributeKind::nominal;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& cell = rows[r][a];
      if (cell.empty() || cell == "?") continue;
      if (numeric) {
        columns[a][r] = *detail::parse_real(cell);
      } else {
        auto [it, inserted] = index.emplace(cell, meta.domain.size());
        if (inserted) meta.domain.push_back(cell);
        columns[a][r] = static_cast<double>(it->second);
      }
    }
  }
  return DataSet(std::move(relation), std::move(attributes), std::move(columns));
}

inline DataSet load_csv(const std::string& path, const CsvOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  auto slash = path.find_last_of("/\\");
  auto stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
  try {
    return parse_csv(in, options, stem.substr(0, stem.find_last_of('.')));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

enum class DataFormat { arff, csv };

inline DataFormat format_from_path(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot != std::string::npos && detail::iequals(std::string_view(path).substr(dot), ".csv")) return DataFormat::csv;
  return DataFormat::arff;
}

inline DataSet load_dataset(const std::string& path, DataFormat format, const CsvOptions& csv = {}) {
  return format == DataFormat::csv ? load_csv(path, csv) : load_arff(path);
}

/// Loads a file and assigns label / survival-time roles in one step.
inline DataSet load_labeled(const std::string& path, DataFormat format, const std::string& label,
                            const std::string& survival_time = {}, const CsvOptions& csv = {}) {
  auto ds = load_dataset(path, format, csv);
  if (!survival_time.empty()) ds = set_role(std::move(ds), survival_time, Role::survival_time);
  return set_role(std::move(ds), label, Role::label);
}

}  // namespace rulelearn
