#pragma once

// Data plumbing shared by the algorithms and the experiment harness: CSV
// I/O, seeded synthetic fixtures, label noise and clustering metrics.

#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include "gbtk/core.hpp"

namespace gbtk {

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : DataError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

class RaggedRows : public DataError {
 public:
  using DataError::DataError;
};
class EmptyFile : public DataError {
 public:
  using DataError::DataError;
};

struct CsvOptions {
  bool has_header = true;
  /// Label column; negative values count from the end (-1 = last column).
  /// nullopt reads every column as a feature.
  std::optional<long> label_column = -1;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses CSV text. Labels are mapped to dense ids 0..L-1 in ascending order
/// of their original values (numeric order when every label is numeric); the
/// original spelling is kept in Dataset::label_names().
inline Dataset parse_csv(const std::string& text, const CsvOptions& options = {}) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (options.has_header && header.empty() && rows.empty()) {
      header = std::move(cells);
      continue;
    }
    rows.push_back(std::move(cells));
    row_lines.push_back(line_no);
  }
  if (rows.empty()) throw EmptyFile("CSV contains no data rows");
  const std::size_t width = rows.front().size();
  if (!header.empty() && header.size() != width)
    throw RaggedRows("header has " + std::to_string(header.size()) + " columns but rows have " + std::to_string(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != width)
      throw RaggedRows("line " + std::to_string(row_lines[r]) + " has " + std::to_string(rows[r].size()) +
                       " columns, expected " + std::to_string(width));

  std::optional<std::size_t> label_col;
  if (options.label_column) {
    const long c = *options.label_column < 0 ? static_cast<long>(width) + *options.label_column : *options.label_column;
    if (c < 0 || c >= static_cast<long>(width)) throw DataError("label column out of range");
    label_col = static_cast<std::size_t>(c);
  }
  const std::size_t d = width - (label_col ? 1 : 0);
  if (d == 0) throw DataError("CSV has no feature columns");

  std::vector<double> values;
  values.reserve(rows.size() * d);
  std::vector<std::string> raw_labels;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) {
      if (label_col && c == *label_col) {
        if (rows[r][c].empty()) throw ParseError(row_lines[r], c + 1, "empty label");
        raw_labels.push_back(rows[r][c]);
        continue;
      }
      const auto v = detail::parse_double(rows[r][c]);
      if (!v) throw ParseError(row_lines[r], c + 1, "cannot parse '" + rows[r][c] + "' as a finite number");
      values.push_back(*v);
    }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (!label_col || c != *label_col) names.push_back(header[c]);

  std::optional<std::vector<int>> labels;
  std::map<int, std::string> label_names;
  if (label_col) {
    std::vector<std::string> distinct(raw_labels.begin(), raw_labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const bool numeric = std::all_of(distinct.begin(), distinct.end(),
                                     [](const std::string& s) { return detail::parse_double(s).has_value(); });
    if (numeric)
      std::stable_sort(distinct.begin(), distinct.end(), [](const std::string& a, const std::string& b) {
        return *detail::parse_double(a) < *detail::parse_double(b);
      });
    std::map<std::string, int> id;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      id[distinct[i]] = static_cast<int>(i);
      label_names[static_cast<int>(i)] = distinct[i];
    }
    labels.emplace();
    for (const auto& s : raw_labels) labels->push_back(id.at(s));
  }
  Dataset ds(rows.size(), d, std::move(values), std::move(labels), std::move(names));
  ds.set_label_names(std::move(label_names));
  return ds;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline Dataset load_csv(const std::string& path, const CsvOptions& options = {}) {
  return parse_csv(read_file(path), options);
}

/// CSV text with a header row; labels (if any) go in the last column using
/// their original names when known. Values use 17 significant digits.
inline std::string to_csv(const Dataset& ds) {
  std::string out;
  for (std::size_t k = 0; k < ds.dim(); ++k) {
    if (k) out += ',';
    out += ds.feature_names().empty() ? "x" + std::to_string(k) : ds.feature_names()[k];
  }
  if (ds.has_labels()) out += ",label";
  out += '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto x = ds.row(i);
    for (std::size_t k = 0; k < ds.dim(); ++k) {
      if (k) out += ',';
      out += detail::format_double(x[k]);
    }
    if (ds.has_labels()) {
      out += ',';
      const int l = ds.label(i);
      auto it = ds.label_names().find(l);
      out += it != ds.label_names().end() ? it->second : std::to_string(l);
    }
    out += '\n';
  }
  return out;
}

/// Writes `content` to `path` via a temporary file and rename, so readers
/// never see a partial file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + tmp + "'");
    f << content;
    if (!f.flush()) throw Error("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

inline void write_csv(const std::string& path, const Dataset& ds) { write_file_atomic(path, to_csv(ds)); }

// ---------------------------------------------------------------------------
// Synthetic fixtures
// ---------------------------------------------------------------------------

enum class SyntheticKind { Blobs, TwoMoons, FourclassLike, Spirals };

inline SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "blobs") return SyntheticKind::Blobs;
  if (s == "two_moons") return SyntheticKind::TwoMoons;
  if (s == "fourclass_like") return SyntheticKind::FourclassLike;
  if (s == "spirals") return SyntheticKind::Spirals;
  throw InvalidInput("unknown synthetic kind '" + s + "'");
}

/// Seeded 2-D, 2-class fixtures.
///  - blobs: alternating labels, Gaussian clouds (sd = noise_std) centred at (-1.5, 0) and (1.5, 0).
///  - two_moons: interleaved half circles plus Gaussian jitter.
///  - fourclass_like: uniform on [-1,1]^2, labelled by the sign of
///    sin(pi x) cos(0.75 pi y) + 0.35 y, keeping a 0.05 gap around the
///    boundary; optional jitter after labelling.
///  - spirals: two interleaved one-turn arms (radius 0.25 to 1) plus jitter.
inline Dataset make_synthetic(SyntheticKind kind, std::size_t n, double noise_std, std::uint64_t seed) {
  if (n < 4) throw InvalidInput("synthetic datasets need n >= 4");
  if (!(noise_std >= 0.0)) throw InvalidInput("noise_std must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double pi = 3.141592653589793;
  std::vector<double> v;
  v.reserve(2 * n);
  std::vector<int> y;
  y.reserve(n);
  auto push = [&](double a, double b, int l) {
    v.push_back(a);
    v.push_back(b);
    y.push_back(l);
  };
  const std::size_t n1 = n / 2;
  switch (kind) {
    case SyntheticKind::Blobs:
      for (std::size_t i = 0; i < n; ++i) {
        const int l = static_cast<int>(i % 2);
        const double a = (l ? 1.5 : -1.5) + noise_std * gauss(rng);
        const double b = noise_std * gauss(rng);
        push(a, b, l);
      }
      break;
    case SyntheticKind::TwoMoons:
      for (std::size_t i = 0; i < n; ++i) {
        const int l = i < n1 ? 0 : 1;
        const double t = pi * unit(rng);
        double a = l ? 1.0 - std::cos(t) : std::cos(t);
        double b = l ? 0.5 - std::sin(t) : std::sin(t);
        a += noise_std * gauss(rng);
        b += noise_std * gauss(rng);
        push(a, b, l);
      }
      break;
    case SyntheticKind::FourclassLike:
      while (y.size() < n) {
        const double a = -1.0 + 2.0 * unit(rng);
        const double b = -1.0 + 2.0 * unit(rng);
        const double g = std::sin(pi * a) * std::cos(0.75 * pi * b) + 0.35 * b;
        if (std::abs(g) < 0.05) continue;
        double ja = a, jb = b;
        if (noise_std > 0.0) {
          ja += noise_std * gauss(rng);
          jb += noise_std * gauss(rng);
        }
        push(ja, jb, g > 0.0 ? 1 : 0);
      }
      break;
    case SyntheticKind::Spirals:
      for (std::size_t i = 0; i < n; ++i) {
        const int l = i < n1 ? 0 : 1;
        const double t = 0.25 + 0.75 * unit(rng);
        const double angle = 2.0 * pi * t + (l ? pi : 0.0);
        const double a = t * std::cos(angle) + noise_std * gauss(rng);
        const double b = t * std::sin(angle) + noise_std * gauss(rng);
        push(a, b, l);
      }
      break;
  }
  return Dataset(n, 2, std::move(v), std::move(y), {"x0", "x1"});
}

/// Flips exactly round(rate * n) distinct labels, each to a uniformly chosen
/// different label. Returns the noisy copy and the flipped rows (ascending).
inline std::pair<Dataset, std::vector<std::size_t>> inject_label_noise(const Dataset& ds, double rate,
                                                                       std::uint64_t seed) {
  const auto& labels = ds.labels();
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInput("noise rate must be in [0, 1)");
  const int L = ds.label_count();
  if (L < 2) throw InvalidInput("label noise needs at least two labels");
  const std::size_t n = ds.size();
  const auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  auto noisy = labels;
  std::uniform_int_distribution<int> other(0, L - 2);
  for (std::size_t i : idx) {
    const int o = other(rng);
    noisy[i] = o >= labels[i] ? o + 1 : o;
  }
  return {ds.with_labels(std::move(noisy)), std::move(idx)};
}

/// Deterministic shuffled split: the first round(fraction * n) rows of a
/// seeded permutation form the first part.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(std::size_t n, double fraction,
                                                                                     std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidInput("split fraction must be in (0, 1)");
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(p[i - 1], p[pick(rng)]);
  }
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> a(p.begin(), p.begin() + static_cast<long>(k)), b(p.begin() + static_cast<long>(k), p.end());
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Adjusted Rand index. Negative ids (noise) each form their own singleton class.
inline double adjusted_rand_index(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw InvalidInput("labelings have different lengths");
  const std::size_t n = pred.size();
  if (n < 2) return 1.0;
  auto densify = [n](std::span<const int> ids) {
    std::vector<long> out(n);
    long next = 0;
    for (int id : ids) next = std::max<long>(next, id + 1L);
    for (std::size_t i = 0; i < n; ++i) out[i] = ids[i] < 0 ? next++ : ids[i];
    return out;
  };
  const auto a = densify(pred), b = densify(truth);
  std::map<std::pair<long, long>, double> cells;
  std::map<long, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [k, c] : cells) index += comb2(c);
  for (const auto& [k, c] : rows) sum_a += comb2(c);
  for (const auto& [k, c] : cols) sum_b += comb2(c);
  const double expected = sum_a * sum_b / comb2(static_cast<double>(n));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

/// Rescales every column to [0, 1]; constant columns become 0.
inline Dataset minmax_scale(const Dataset& ds) {
  const std::size_t n = ds.size(), d = ds.dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], ds.row(i)[k]);
      hi[k] = std::max(hi[k], ds.row(i)[k]);
    }
  std::vector<double> v(n * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k)
      v[i * d + k] = hi[k] > lo[k] ? (ds.row(i)[k] - lo[k]) / (hi[k] - lo[k]) : 0.0;
  std::optional<std::vector<int>> labels;
  if (ds.has_labels()) labels = ds.labels();
  Dataset out(n, d, std::move(v), std::move(labels), ds.feature_names());
  out.set_label_names(ds.label_names());
  return out;
}

}  // namespace gbtk
