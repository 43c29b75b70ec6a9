#pragma once

// JSON output with a fixed field order and 17-significant-digit floats, so
// identical runs give identical bytes. Reading goes through nlohmann::json.
// SHA-256 fingerprints come from OpenSSL (link OpenSSL::Crypto).

#include <openssl/evp.h>

#include <json.hpp>
#include <variant>

#include "gbtk/cluster.hpp"
#include "gbtk/data.hpp"
#include "gbtk/gbsvm.hpp"
#include "gbtk/optimize.hpp"
#include "gbtk/roughset.hpp"

namespace gbtk {

/// Minimal streaming writer producing compact JSON.
class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(std::string_view k) {
    separator();
    string(k);
    out_ += ':';
    after_key_ = true;
    return *this;
  }

  JsonWriter& value(double v) {
    if (!std::isfinite(v)) throw NonFinite("cannot write a non-finite number to JSON");
    separator();
    out_ += detail::format_double(v);
    return *this;
  }
  JsonWriter& value(int v) { return integer(v); }
  JsonWriter& value(long v) { return integer(v); }
  JsonWriter& value(long long v) { return integer(v); }
  JsonWriter& value(unsigned v) { return integer(v); }
  JsonWriter& value(unsigned long v) { return integer(v); }
  JsonWriter& value(unsigned long long v) { return integer(v); }
  JsonWriter& value(bool v) {
    separator();
    out_ += v ? "true" : "false";
    return *this;
  }
  JsonWriter& value(std::string_view s) {
    separator();
    string(s);
    return *this;
  }
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& value(const std::string& s) { return value(std::string_view(s)); }
  JsonWriter& null() {
    separator();
    out_ += "null";
    return *this;
  }
  template <class T>
  JsonWriter& value(const std::optional<T>& v) {
    return v ? value(*v) : null();
  }
  template <class T>
  JsonWriter& array(std::span<const T> xs) {
    begin_array();
    for (const auto& x : xs) value(x);
    return end_array();
  }
  template <class T>
  JsonWriter& array(const std::vector<T>& xs) {
    return array(std::span<const T>(xs));
  }
  template <class T>
  JsonWriter& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }

  const std::string& str() const { return out_; }

 private:
  template <class I>
  JsonWriter& integer(I v) {
    separator();
    out_ += std::to_string(v);
    return *this;
  }
  JsonWriter& open(char c) {
    separator();
    out_ += c;
    first_.push_back(true);
    return *this;
  }
  JsonWriter& close(char c) {
    out_ += c;
    first_.pop_back();
    return *this;
  }
  void separator() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (!first_.empty()) {
      if (!first_.back()) out_ += ',';
      first_.back() = false;
    }
  }
  void string(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

// ---------------------------------------------------------------------------
// Fingerprints and experiment reports
// ---------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

/// Hash of the dataset's canonical CSV form.
inline std::string dataset_fingerprint(const Dataset& ds) { return sha256_hex(to_csv(ds)); }

using ConfigValue = std::variant<double, long long, std::string, bool>;

struct ExperimentReport {
  std::string algorithm;
  std::vector<std::pair<std::string, ConfigValue>> config;
  /// Written in insertion order.
  std::vector<std::pair<std::string, double>> metrics;
  std::uint64_t seed = 0;
  std::string fingerprint;

  void set_metric(const std::string& name, double v) {
    if (!std::isfinite(v)) throw NonFinite("metric '" + name + "' is not finite");
    for (auto& [k, x] : metrics)
      if (k == name) {
        x = v;
        return;
      }
    metrics.emplace_back(name, v);
  }
  std::optional<double> metric(const std::string& name) const {
    for (const auto& [k, x] : metrics)
      if (k == name) return x;
    return std::nullopt;
  }
};

inline void write_report(JsonWriter& w, const ExperimentReport& r) {
  w.begin_object().field("algorithm", r.algorithm).key("config").begin_object();
  for (const auto& [k, v] : r.config) {
    w.key(k);
    std::visit([&](const auto& x) { w.value(x); }, v);
  }
  w.end_object().key("metrics").begin_object();
  for (const auto& [k, v] : r.metrics) w.field(k, v);
  w.end_object().field("seed", r.seed).field("fingerprint", r.fingerprint).end_object();
}

inline std::string reports_to_json(const std::string& suite, const std::vector<ExperimentReport>& reports) {
  JsonWriter w;
  w.begin_object().field("suite", suite).key("reports").begin_array();
  for (const auto& r : reports) write_report(w, r);
  w.end_array().end_object();
  return w.str() + "\n";
}

// ---------------------------------------------------------------------------
// Ball sets
// ---------------------------------------------------------------------------

inline void write_ball(JsonWriter& w, const GranularBall& b) {
  w.begin_object().key("members").array(b.members()).key("center").array(b.center()).field("radius", b.radius());
  w.field("label", b.label()).field("purity", b.purity()).end_object();
}

inline std::string ballset_to_json(const BallSet& set) {
  JsonWriter w;
  w.begin_object().key("balls").begin_array();
  for (const auto& b : set.balls) write_ball(w, b);
  w.end_array();
  w.field("threshold", set.purity_threshold).field("seed", set.seed).field("radius_mode", to_string(set.radius_mode));
  w.field("source_n", set.source_n).key("label_names").array(set.label_names).end_object();
  return w.str() + "\n";
}

/// Center/radius per ball, for external plotting.
inline std::string geometry_to_json(const BallSet& set) {
  JsonWriter w;
  w.begin_object().key("balls").begin_array();
  for (const auto& b : set.balls)
    w.begin_object().key("center").array(b.center()).field("radius", b.radius()).field("size", b.size()).end_object();
  w.end_array().end_object();
  return w.str() + "\n";
}

namespace detail {
inline nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
}
}  // namespace detail

inline BallSet ballset_from_json(const std::string& text) {
  const auto j = detail::parse_json(text);
  try {
    BallSet set;
    set.radius_mode = radius_mode_from_string(j.at("radius_mode").get<std::string>());
    if (!j.at("threshold").is_null()) set.purity_threshold = j.at("threshold").get<double>();
    set.seed = j.at("seed").get<std::uint64_t>();
    set.source_n = j.value("source_n", std::size_t{0});
    if (j.contains("label_names")) set.label_names = j.at("label_names").get<std::vector<std::string>>();
    for (const auto& jb : j.at("balls")) {
      std::optional<int> label;
      std::optional<double> pur;
      if (!jb.at("label").is_null()) label = jb.at("label").get<int>();
      if (!jb.at("purity").is_null()) pur = jb.at("purity").get<double>();
      set.balls.emplace_back(jb.at("members").get<std::vector<std::size_t>>(),
                             jb.at("center").get<std::vector<double>>(), jb.at("radius").get<double>(),
                             set.radius_mode, label, pur);
    }
    if (set.source_n == 0)
      for (const auto& b : set.balls)
        for (std::size_t m : b.members()) set.source_n = std::max(set.source_n, m + 1);
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ball set JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Models and results
// ---------------------------------------------------------------------------

/// Model JSON: {"w","b","C","alphas","delta"} followed by label bookkeeping.
inline std::string svm_model_to_json(const GbsvmClassifier& f) {
  const auto& m = f.model;
  JsonWriter w;
  w.begin_object().key("w").array(m.w).field("b", m.b).field("C", m.C).key("alphas").array(m.alphas);
  w.key("delta").array(m.delta).field("positive_label", f.positive_label).field("negative_label", f.negative_label);
  w.key("label_names").array(f.label_names).field("iterations", m.iterations).field("polished", m.polished);
  w.end_object();
  return w.str() + "\n";
}

inline GbsvmClassifier svm_model_from_json(const std::string& text) {
  const auto j = detail::parse_json(text);
  try {
    GbsvmClassifier f;
    auto& m = f.model;
    m.w = j.at("w").get<std::vector<double>>();
    m.b = j.at("b").get<double>();
    m.C = j.at("C").get<double>();
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.delta = j.at("delta").get<std::vector<double>>();
    m.iterations = j.value("iterations", std::size_t{0});
    m.polished = j.value("polished", false);
    f.positive_label = j.value("positive_label", 1);
    f.negative_label = j.value("negative_label", 0);
    if (j.contains("label_names")) f.label_names = j.at("label_names").get<std::vector<std::string>>();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed SVM model JSON: ") + e.what());
  }
}

inline std::string clustering_to_json(const ClusterResult& r) {
  const auto& c = r.clustering;
  std::vector<std::vector<std::size_t>> balls(c.cluster_count), points(c.cluster_count);
  for (std::size_t i = 0; i < r.balls.size(); ++i)
    if (c.ball_cluster[i] != kNoise) balls[static_cast<std::size_t>(c.ball_cluster[i])].push_back(i);
  for (std::size_t p = 0; p < c.assignment.size(); ++p)
    if (c.assignment[p] != kNoise) points[static_cast<std::size_t>(c.assignment[p])].push_back(p);
  JsonWriter w;
  w.begin_object().key("clusters").begin_array();
  for (std::size_t k = 0; k < c.cluster_count; ++k)
    w.begin_object().field("id", k).key("balls").array(balls[k]).key("points").array(points[k]).end_object();
  w.end_array().key("noise_points").array(c.noise_points).field("slack", r.slack);
  w.key("geometry").begin_array();
  for (std::size_t i = 0; i < r.balls.size(); ++i) {
    const auto& b = r.balls.balls[i];
    w.begin_object().key("center").array(b.center()).field("radius", b.radius()).field("size", b.size());
    w.field("cluster", c.ball_cluster[i]).end_object();
  }
  w.end_array().end_object();
  return w.str() + "\n";
}

inline std::string reduct_to_json(const ReductState& s) {
  JsonWriter w;
  w.begin_object().key("selected").array(s.selected).key("gamma_history").begin_array();
  for (const auto& [a, g] : s.history) w.begin_array().value(a).value(g).end_array();
  w.end_array().field("gamma_full", s.gamma_full).end_object();
  return w.str() + "\n";
}

/// One JSON object per line: {"eval","point","value","ball_radius"}.
inline std::string trace_to_json_lines(const std::vector<TraceEntry>& trace) {
  std::string out;
  for (const auto& t : trace) {
    JsonWriter w;
    w.begin_object().field("eval", t.eval).key("point").array(t.point).field("value", t.value);
    w.field("ball_radius", t.ball_radius).end_object();
    out += w.str();
    out += '\n';
  }
  return out;
}

}  // namespace gbtk
