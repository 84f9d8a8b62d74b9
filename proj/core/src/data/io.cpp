#include "sdca/data/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <utility>

namespace sdca::data {

namespace {

struct RawRow {
  std::string label;
  std::vector<std::pair<FeatureIndex, double>> entries;
};

std::string_view trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw DataError(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<RawRow> read_libsvm(const std::string& path, std::istream& in) {
  std::vector<RawRow> rows;
  std::string buffer;
  std::size_t line_no = 0;
  while (std::getline(in, buffer)) {
    ++line_no;
    std::string_view line = buffer;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    RawRow row;
    std::istringstream tokens{std::string(line)};
    std::string token;
    tokens >> row.label;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) fail(path, line_no, "expected idx:val, got '" + token + "'");
      unsigned long long index = 0;
      const std::string_view idx_text(token.data(), colon);
      const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
      if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || index == 0) {
        fail(path, line_no, "invalid feature index in '" + token + "'");
      }
      double value = 0.0;
      if (!parse_double(std::string_view(token).substr(colon + 1), value)) {
        fail(path, line_no, "invalid feature value in '" + token + "'");
      }
      row.entries.emplace_back(static_cast<FeatureIndex>(index - 1), value);
    }
    std::sort(row.entries.begin(), row.entries.end());
    for (std::size_t k = 1; k < row.entries.size(); ++k) {
      if (row.entries[k].first == row.entries[k - 1].first) {
        fail(path, line_no, "duplicate feature index " + std::to_string(row.entries[k].first + 1));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RawRow> read_csv(const std::string& path, std::istream& in,
                             const std::string& label_column, std::size_t& columns) {
  std::vector<RawRow> rows;
  std::string buffer;
  std::size_t line_no = 0;
  std::size_t label_pos = 0;
  std::size_t num_fields = 0;
  bool header_seen = false;
  while (std::getline(in, buffer)) {
    ++line_no;
    const std::string_view line = trim(buffer);
    if (line.empty()) continue;
    const auto fields = split_fields(line, ',');
    if (!header_seen) {
      const auto it = std::find(fields.begin(), fields.end(), label_column);
      if (it == fields.end()) fail(path, line_no, "no column named '" + label_column + "'");
      label_pos = static_cast<std::size_t>(it - fields.begin());
      num_fields = fields.size();
      header_seen = true;
      continue;
    }
    if (fields.size() != num_fields) {
      fail(path, line_no, "expected " + std::to_string(num_fields) + " fields, got " +
                              std::to_string(fields.size()));
    }
    RawRow row;
    FeatureIndex feature = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_pos) {
        row.label = std::string(fields[c]);
        continue;
      }
      double value = 0.0;
      if (!parse_double(fields[c], value)) {
        fail(path, line_no, "invalid value '" + std::string(fields[c]) + "'");
      }
      if (value != 0.0) row.entries.emplace_back(feature, value);
      ++feature;
    }
    if (row.label.empty()) fail(path, line_no, "empty label");
    rows.push_back(std::move(row));
  }
  columns = num_fields == 0 ? 0 : num_fields - 1;
  return rows;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "libsvm") return Format::kLibsvm;
  if (name == "csv") return Format::kCsv;
  throw DataError("unknown format '" + name + "' (expected libsvm or csv)");
}

Dataset load_sparse_text(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::size_t csv_columns = 0;
  std::vector<RawRow> rows = options.format == Format::kLibsvm
                                 ? read_libsvm(path, in)
                                 : read_csv(path, in, options.label_column, csv_columns);
  if (rows.empty()) throw DataError(path + ": no data rows");

  // Label text -> class id, numeric order when every label is a number.
  std::vector<std::string> names;
  for (const auto& r : rows) names.push_back(r.label);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  const bool numeric = std::all_of(names.begin(), names.end(), [](const std::string& s) {
    double v;
    return parse_double(s, v);
  });
  if (numeric) {
    std::stable_sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
      double x = 0, y = 0;
      parse_double(a, x);
      parse_double(b, y);
      return x < y;
    });
    // "1" and "+1" denote the same class.
    names.erase(std::unique(names.begin(), names.end(),
                            [](const std::string& a, const std::string& b) {
                              double x = 0, y = 0;
                              parse_double(a, x);
                              parse_double(b, y);
                              return x == y;
                            }),
                names.end());
  }
  auto class_of = [&](const std::string& label) -> int {
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k] == label) return static_cast<int>(k + 1);
      if (numeric) {
        double x = 0, y = 0;
        parse_double(names[k], x);
        parse_double(label, y);
        if (x == y) return static_cast<int>(k + 1);
      }
    }
    return 0;
  };

  std::size_t dimension = csv_columns;
  for (const auto& r : rows) {
    if (!r.entries.empty()) dimension = std::max<std::size_t>(dimension, r.entries.back().first + 1);
  }
  if (options.dimension) {
    if (*options.dimension < dimension) {
      throw DataError(path + ": data has " + std::to_string(dimension) +
                      " features, more than the requested dimension");
    }
    dimension = *options.dimension;
  }

  Dataset dataset(dimension, names.size());
  std::map<std::string, int> cache;
  std::vector<FeatureIndex> idx;
  std::vector<double> val;
  for (const auto& r : rows) {
    auto [it, inserted] = cache.try_emplace(r.label, 0);
    if (inserted) it->second = class_of(r.label);
    idx.clear();
    val.clear();
    for (const auto& [j, v] : r.entries) {
      idx.push_back(j);
      val.push_back(v);
    }
    dataset.add_row(idx, val, it->second);
  }
  dataset.label_names = names;
  std::string mapping;
  for (std::size_t k = 0; k < names.size(); ++k) {
    mapping += (k ? ", " : "") + names[k] + "->" + std::to_string(k + 1);
  }
  dataset.provenance = "file:" + path + " labels{" + mapping + "}";
  return dataset;
}

void write_sparse_text(const Dataset& dataset, const std::string& path, Format format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  auto label_text = [&](int y) {
    const auto k = static_cast<std::size_t>(y - 1);
    return k < dataset.label_names.size() ? dataset.label_names[k] : std::to_string(y);
  };
  if (format == Format::kLibsvm) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const SparseRow row = dataset.row(i);
      out << label_text(dataset.label(i));
      for (std::size_t k = 0; k < row.nnz(); ++k) {
        out << ' ' << (row.indices[k] + 1) << ':' << format_double(row.values[k]);
      }
      out << '\n';
    }
  } else {
    out << "label";
    for (std::size_t j = 0; j < dataset.dimension(); ++j) out << ",f" << (j + 1);
    out << '\n';
    std::vector<double> dense(dataset.dimension());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      std::fill(dense.begin(), dense.end(), 0.0);
      const SparseRow row = dataset.row(i);
      for (std::size_t k = 0; k < row.nnz(); ++k) dense[row.indices[k]] = row.values[k];
      out << label_text(dataset.label(i));
      for (double v : dense) out << ',' << format_double(v);
      out << '\n';
    }
  }
  if (!out) throw DataError("failed while writing '" + path + "'");
}

}  // namespace sdca::data
