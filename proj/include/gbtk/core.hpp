#pragma once

// Granular-ball primitives: the dataset container, the ball itself, the
// covering (BallSet) and the geometric/quality measures every algorithm in
// the toolkit is built on. Distances are Euclidean throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace gbtk {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed input data (files, labels, shapes). The CLI maps
/// every DataError to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

class InvalidBall : public Error {
 public:
  using Error::Error;
};
class InvalidInput : public Error {
 public:
  using Error::Error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class MissingLabels : public DataError {
 public:
  MissingLabels() : DataError("dataset has no labels") {}
  using DataError::DataError;
};
class SplitStalled : public Error {
 public:
  using Error::Error;
};
class EmptyModel : public Error {
 public:
  using Error::Error;
};
class NonFinite : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Small vector helpers
// ---------------------------------------------------------------------------

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

/// Row-major n x d feature matrix with optional dense integer labels.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t n, std::size_t d, std::vector<double> values,
          std::optional<std::vector<int>> labels = std::nullopt,
          std::vector<std::string> feature_names = {})
      : n_(n), d_(d), values_(std::move(values)), labels_(std::move(labels)),
        feature_names_(std::move(feature_names)) {
    if (n_ == 0 || d_ == 0) throw DataError("dataset must have n >= 1 and d >= 1");
    if (values_.size() != n_ * d_) throw DataError("dataset value count does not match n*d");
    for (double v : values_)
      if (!std::isfinite(v)) throw DataError("dataset contains a non-finite value");
    if (labels_) {
      if (labels_->size() != n_) throw DataError("label count does not match row count");
      for (int l : *labels_)
        if (l < 0) throw DataError("labels must be non-negative integers");
    }
    if (!feature_names_.empty() && feature_names_.size() != d_)
      throw DataError("feature name count does not match dimension");
  }

  /// Builds a dataset from a list of equally sized rows.
  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           std::optional<std::vector<int>> labels = std::nullopt) {
    if (rows.empty()) throw DataError("dataset must have at least one row");
    const std::size_t d = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * d);
    for (const auto& r : rows) {
      if (r.size() != d) throw DataError("rows have different lengths");
      values.insert(values.end(), r.begin(), r.end());
    }
    return Dataset(rows.size(), d, std::move(values), std::move(labels));
  }

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * d_, d_}; }
  const std::vector<double>& values() const { return values_; }

  bool has_labels() const { return labels_.has_value(); }
  const std::vector<int>& labels() const {
    if (!labels_) throw MissingLabels();
    return *labels_;
  }
  int label(std::size_t i) const { return labels()[i]; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  /// Original label values keyed by dense id; empty when labels were dense already.
  const std::map<int, std::string>& label_names() const { return label_names_; }
  void set_label_names(std::map<int, std::string> names) { label_names_ = std::move(names); }

  /// Number of distinct label ids (max id + 1).
  int label_count() const {
    const auto& l = labels();
    return l.empty() ? 0 : *std::max_element(l.begin(), l.end()) + 1;
  }

  /// Copy restricted to the given rows (labels follow).
  Dataset subset(std::span<const std::size_t> rows) const {
    std::vector<double> v;
    v.reserve(rows.size() * d_);
    std::optional<std::vector<int>> l;
    if (labels_) l.emplace();
    for (std::size_t r : rows) {
      auto x = row(r);
      v.insert(v.end(), x.begin(), x.end());
      if (l) l->push_back((*labels_)[r]);
    }
    Dataset out(rows.size(), d_, std::move(v), std::move(l), feature_names_);
    out.label_names_ = label_names_;
    return out;
  }

  /// Copy restricted to the given feature columns, in the given order.
  Dataset project(std::span<const std::size_t> columns) const {
    if (columns.empty()) throw InvalidInput("projection needs at least one attribute");
    std::vector<double> v;
    v.reserve(n_ * columns.size());
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t c : columns) {
        if (c >= d_) throw InvalidInput("attribute index out of range");
        v.push_back(values_[i * d_ + c]);
      }
    std::vector<std::string> names;
    if (!feature_names_.empty())
      for (std::size_t c : columns) names.push_back(feature_names_[c]);
    Dataset out(n_, columns.size(), std::move(v), labels_, std::move(names));
    out.label_names_ = label_names_;
    return out;
  }

  Dataset with_labels(std::vector<int> labels) const {
    Dataset out(n_, d_, values_, std::move(labels), feature_names_);
    out.label_names_ = label_names_;
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
  std::optional<std::vector<int>> labels_;
  std::vector<std::string> feature_names_;
  std::map<int, std::string> label_names_;
};

// ---------------------------------------------------------------------------
// Ball statistics
// ---------------------------------------------------------------------------

enum class RadiusMode { Average, Maximum };

inline const char* to_string(RadiusMode m) { return m == RadiusMode::Average ? "average" : "maximum"; }

inline RadiusMode radius_mode_from_string(const std::string& s) {
  if (s == "average") return RadiusMode::Average;
  if (s == "maximum") return RadiusMode::Maximum;
  throw InvalidInput("unknown radius mode '" + s + "'");
}

namespace detail {
inline void check_members(const Dataset& ds, std::span<const std::size_t> members) {
  if (members.empty()) throw InvalidBall("ball has no members");
  for (std::size_t m : members)
    if (m >= ds.size()) throw InvalidBall("member index out of range");
}
}  // namespace detail

/// Component-wise mean of the member rows.
inline std::vector<double> compute_center(const Dataset& ds, std::span<const std::size_t> members) {
  detail::check_members(ds, members);
  std::vector<double> c(ds.dim(), 0.0);
  for (std::size_t m : members) {
    auto x = ds.row(m);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += x[k];
  }
  const double inv = 1.0 / static_cast<double>(members.size());
  for (double& v : c) v *= inv;
  return c;
}

/// Mean (Average) or max (Maximum) member-to-center distance.
inline double compute_radius(const Dataset& ds, std::span<const std::size_t> members,
                             std::span<const double> center, RadiusMode mode) {
  detail::check_members(ds, members);
  if (center.size() != ds.dim()) throw DimensionError("center dimension does not match dataset");
  double acc = 0.0;
  for (std::size_t m : members) {
    const double dist = distance(ds.row(m), center);
    acc = mode == RadiusMode::Average ? acc + dist : std::max(acc, dist);
  }
  return mode == RadiusMode::Average ? acc / static_cast<double>(members.size()) : acc;
}

struct PurityResult {
  double value = 1.0;
  int majority_label = 0;
  int distinct_labels = 1;
};

/// Fraction of members carrying the most frequent label. Count ties resolve
/// to the smallest label id.
inline PurityResult purity(const Dataset& ds, std::span<const std::size_t> members) {
  if (!ds.has_labels()) throw MissingLabels();
  detail::check_members(ds, members);
  std::map<int, std::size_t> counts;
  for (std::size_t m : members) ++counts[ds.label(m)];
  PurityResult r;
  std::size_t best = 0;
  for (const auto& [label, c] : counts)
    if (c > best) {  // map iterates ascending, so strict > keeps the smallest id on ties
      best = c;
      r.majority_label = label;
    }
  r.value = static_cast<double>(best) / static_cast<double>(members.size());
  r.distinct_labels = static_cast<int>(counts.size());
  return r;
}

// ---------------------------------------------------------------------------
// GranularBall
// ---------------------------------------------------------------------------

/// A hyper-ball summarising a subset of dataset rows. Statistics are computed
/// once at construction; balls are never mutated afterwards.
class GranularBall {
 public:
  GranularBall() = default;

  /// Geometry-only ball (no dataset members), e.g. a query point or a ball
  /// read back from a serialized model.
  GranularBall(std::vector<double> center, double radius, std::optional<int> label = std::nullopt)
      : center_(std::move(center)), radius_(radius), label_(label) {
    if (radius_ < 0.0 || !std::isfinite(radius_)) throw InvalidBall("radius must be finite and >= 0");
  }

  /// Fully specified ball, used when deserializing a stored covering.
  GranularBall(std::vector<std::size_t> members, std::vector<double> center, double radius, RadiusMode mode,
               std::optional<int> label, std::optional<double> purity)
      : members_(std::move(members)), center_(std::move(center)), radius_(radius), mode_(mode),
        label_(label), purity_(purity) {
    if (members_.empty()) throw InvalidBall("ball has no members");
    if (radius_ < 0.0 || !std::isfinite(radius_)) throw InvalidBall("radius must be finite and >= 0");
  }

  /// Computes center, radius and (when labeled) majority label and purity.
  static GranularBall from_members(const Dataset& ds, std::vector<std::size_t> members, RadiusMode mode) {
    detail::check_members(ds, members);
    std::sort(members.begin(), members.end());
    if (std::adjacent_find(members.begin(), members.end()) != members.end())
      throw InvalidBall("ball members must be distinct");
    GranularBall b;
    b.center_ = compute_center(ds, members);
    b.radius_ = members.size() == 1 ? 0.0 : compute_radius(ds, members, b.center_, mode);
    b.mode_ = mode;
    if (ds.has_labels()) {
      const auto p = gbtk::purity(ds, members);
      b.label_ = p.majority_label;
      b.purity_ = p.value;
    }
    b.members_ = std::move(members);
    return b;
  }

  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  const std::vector<double>& center() const { return center_; }
  double radius() const { return radius_; }
  RadiusMode radius_mode() const { return mode_; }
  std::optional<int> label() const { return label_; }
  std::optional<double> purity() const { return purity_; }
  std::size_t dim() const { return center_.size(); }
  bool is_singleton() const { return members_.size() == 1; }

 private:
  std::vector<std::size_t> members_;
  std::vector<double> center_;
  double radius_ = 0.0;
  RadiusMode mode_ = RadiusMode::Average;
  std::optional<int> label_;
  std::optional<double> purity_;
};

/// Boundary-to-boundary separation; negative when the balls overlap.
inline double ball_distance(const GranularBall& a, const GranularBall& b) {
  if (a.dim() != b.dim()) throw DimensionError("balls have different dimensions");
  return distance(a.center(), b.center()) - (a.radius() + b.radius());
}

// ---------------------------------------------------------------------------
// BallSet
// ---------------------------------------------------------------------------

/// A covering of a dataset: balls with pairwise disjoint members plus the
/// provenance of the run that produced them.
struct BallSet {
  std::vector<GranularBall> balls;
  std::size_t source_n = 0;
  std::optional<double> purity_threshold;
  std::uint64_t seed = 0;
  RadiusMode radius_mode = RadiusMode::Average;
  /// Original label spellings by dense id, when the source data had them.
  std::vector<std::string> label_names;

  std::size_t size() const { return balls.size(); }
  bool empty() const { return balls.empty(); }

  /// Sorts balls by their smallest member index (geometry-only balls last,
  /// in their existing relative order).
  void normalize_order() {
    std::stable_sort(balls.begin(), balls.end(), [](const GranularBall& a, const GranularBall& b) {
      if (a.members().empty() || b.members().empty()) return !a.members().empty() && b.members().empty();
      return a.members().front() < b.members().front();
    });
  }
};

/// Fraction of the source rows assigned to some ball.
inline double coverage(const BallSet& set) {
  if (set.source_n == 0) return 0.0;
  std::size_t covered = 0;
  for (const auto& b : set.balls) covered += b.size();
  return static_cast<double>(covered) / static_cast<double>(set.source_n);
}

// ---------------------------------------------------------------------------
// Parallelism
// ---------------------------------------------------------------------------

/// Worker count: GBTK_THREADS when set to a positive integer, otherwise the
/// machine's hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("GBTK_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, count) over contiguous chunks. Each index is
/// handled by exactly one worker, so writes to per-index slots are
/// deterministic regardless of the thread count.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, w, &fn, &errors] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace gbtk
