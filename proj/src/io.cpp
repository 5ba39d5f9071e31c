#include "adjstab/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <vector>

namespace adjstab {

namespace {

[[noreturn]] void parse_error(std::string_view source, std::size_t line, const std::string& msg) {
  throw StabilityError(ErrorClass::ParseError,
                       std::string(source) + ":" + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view field) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

// Reads all lines, stripping a trailing '\r'. A final newline does not start
// another line.
std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StabilityError(ErrorClass::IoError, "cannot open '" + path.string() + "'");
  return in;
}

FeatureUniverse parse_header(std::string_view line, std::string_view source, std::size_t lineno) {
  std::vector<std::string> ids;
  for (auto f : split_commas(line)) ids.push_back(unquote(f));
  if (!ids.empty() && ids.front().empty()) ids.erase(ids.begin());  // R-style corner cell
  for (const auto& id : ids)
    if (id.empty()) parse_error(source, lineno, "empty feature id in header");
  try {
    return FeatureUniverse(std::move(ids));
  } catch (const StabilityError& e) {
    parse_error(source, lineno, e.what());
  }
}

// Parses a numeric CSV body of `rows_expected` rows (0 = any number) with p
// columns, tolerating a leading label column.
std::vector<double> parse_numeric_rows(const std::vector<std::string>& lines,
                                       const FeatureUniverse& universe, std::string_view source,
                                       bool labels_must_match, std::size_t& n_rows) {
  const std::size_t p = universe.size();
  std::vector<double> values;
  n_rows = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const std::size_t lineno = k + 1;
    if (trim(lines[k]).empty()) continue;
    auto fields = split_commas(lines[k]);
    if (fields.size() == p + 1) {
      const auto label = unquote(fields.front());
      if (labels_must_match && (n_rows >= p || label != universe.id(static_cast<FeatureIndex>(n_rows))))
        parse_error(source, lineno, "row label '" + label + "' does not match header order");
      fields.erase(fields.begin());
    }
    if (fields.size() != p)
      parse_error(source, lineno,
                  "expected " + std::to_string(p) + " values, got " + std::to_string(fields.size()));
    for (auto f : fields) {
      auto v = parse_number(f);
      if (!v) parse_error(source, lineno, "not a number: '" + std::string(trim(f)) + "'");
      values.push_back(*v);
    }
    ++n_rows;
  }
  return values;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

SimilarityMatrix read_similarity_csv(std::istream& in, std::string_view source) {
  const auto lines = read_lines(in);
  if (lines.empty()) parse_error(source, 1, "missing header row");
  auto universe = parse_header(lines.front(), source, 1);
  std::size_t rows = 0;
  auto values = parse_numeric_rows(lines, universe, source, true, rows);
  const std::size_t p = universe.size();
  if (rows != p)
    throw StabilityError(ErrorClass::NonSquare, std::string(source) + ": expected " +
                                                    std::to_string(p) + " rows, got " +
                                                    std::to_string(rows));
  return validate_similarity_matrix(std::move(values), p, p, std::move(universe));
}

SimilarityMatrix load_similarity_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_similarity_csv(in, path.string());
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& sim) {
  const auto& ids = sim.universe().ids();
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
  out << '\n';
  const std::size_t p = sim.size();
  for (std::size_t i = 0; i < p; ++i) {
    const auto row = sim.row(static_cast<FeatureIndex>(i));
    for (std::size_t j = 0; j < p; ++j) out << (j ? "," : "") << format_double(row[j]);
    out << '\n';
  }
}

SelectionEnsemble read_ensemble(std::istream& in, std::string_view source) {
  constexpr std::string_view kHeader = "#universe:";
  const auto lines = read_lines(in);
  if (lines.empty() || lines.front().rfind(kHeader, 0) != 0)
    parse_error(source, 1, "first line must be '#universe: id1,id2,...'");
  auto universe = parse_header(std::string_view(lines.front()).substr(kHeader.size()), source, 1);

  std::vector<FeatureSet> sets;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const std::size_t lineno = k + 1;
    std::vector<std::string> ids;
    if (!trim(lines[k]).empty()) {
      std::set<std::string> seen;
      for (auto f : split_commas(lines[k])) {
        auto id = unquote(f);
        if (id.empty()) parse_error(source, lineno, "empty feature id");
        if (!universe.index_of(id)) parse_error(source, lineno, "unknown feature id '" + id + "'");
        if (!seen.insert(id).second) parse_error(source, lineno, "feature '" + id + "' listed twice");
        ids.push_back(std::move(id));
      }
    }
    sets.emplace_back(universe, ids);
  }
  if (sets.size() < 2)
    throw StabilityError(ErrorClass::TooFewSets, std::string(source) +
                                                     ": an ensemble needs at least 2 sets, got " +
                                                     std::to_string(sets.size()));
  return SelectionEnsemble(std::move(universe), std::move(sets));
}

SelectionEnsemble load_ensemble(const std::filesystem::path& path) {
  auto in = open(path);
  return read_ensemble(in, path.string());
}

void write_ensemble(std::ostream& out, const SelectionEnsemble& ensemble) {
  const auto& ids = ensemble.universe().ids();
  out << "#universe: ";
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
  out << '\n';
  for (const auto& set : ensemble.sets()) {
    bool first = true;
    for (auto idx : set.members()) {
      out << (first ? "" : ",") << ids[idx];
      first = false;
    }
    out << '\n';
  }
}

DataMatrix read_data_csv(std::istream& in, std::string_view source) {
  const auto lines = read_lines(in);
  if (lines.empty()) parse_error(source, 1, "missing header row");
  auto universe = parse_header(lines.front(), source, 1);
  std::size_t rows = 0;
  auto values = parse_numeric_rows(lines, universe, source, false, rows);
  return DataMatrix(std::move(universe), rows, std::move(values));
}

DataMatrix load_data_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_data_csv(in, path.string());
}

void write_data_csv(std::ostream& out, const DataMatrix& data) {
  const auto& ids = data.universe().ids();
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
  out << '\n';
  for (std::size_t r = 0; r < data.n(); ++r) {
    for (std::size_t k = 0; k < data.p(); ++k) out << (k ? "," : "") << format_double(data(r, k));
    out << '\n';
  }
}

}  // namespace adjstab
