#pragma once

#include "bismut_lab/courant.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace bismut_lab {

using json = nlohmann::ordered_json;

namespace io_detail {

template <class T>
void split_parts(const T& t, std::vector<double>& re, std::vector<double>& im) {
  re.clear();
  im.clear();
  for (const auto& v : t.data()) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
}

inline void split_mat(const Mat& m, std::vector<double>& re, std::vector<double>& im) {
  re.clear();
  im.clear();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
}

inline std::vector<double> get_array(const json& j, const std::string& key, std::size_t expect) {
  if (!j.contains(key)) throw ConfigError("missing field '" + key + "'");
  auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != expect) throw DimensionMismatch("field '" + key + "' has wrong length");
  return v;
}

template <class T>
void fill(T& t, const json& j, const std::string& name, bool optional) {
  const std::size_t len = t.size();
  if (optional && !j.contains(name + "_re")) return;
  const auto re = get_array(j, name + "_re", len);
  const auto im = get_array(j, name + "_im", len);
  for (std::size_t k = 0; k < len; ++k) t.data()[k] = cd(re[k], im[k]);
}

}  // namespace io_detail

/** Jet as JSON: flat row-major arrays, indices as stored in MetricJet. */
inline json jet_to_json(const MetricJet& jet) {
  std::vector<double> re, im;
  json j;
  j["n"] = jet.n;
  io_detail::split_mat(jet.g, re, im);
  j["g_re"] = re;
  j["g_im"] = im;
  io_detail::split_parts(jet.dg, re, im);
  j["dg_re"] = re;
  j["dg_im"] = im;
  io_detail::split_parts(jet.d2g, re, im);
  j["d2g_re"] = re;
  j["d2g_im"] = im;
  io_detail::split_parts(jet.ddg, re, im);
  j["ddg_re"] = re;
  j["ddg_im"] = im;
  return j;
}

/** Inverse of jet_to_json; ddg is optional and defaults to zero. */
inline MetricJet jet_from_json(const json& j) {
  if (!j.contains("n")) throw ConfigError("missing field 'n'");
  const int n = j.at("n").get<int>();
  if (n < 1 || n > 8) throw DimensionMismatch("unsupported dimension");
  MetricJet jet(n);
  const auto re = io_detail::get_array(j, "g_re", static_cast<std::size_t>(n) * n);
  const auto im = io_detail::get_array(j, "g_im", static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) jet.g(a, b) = cd(re[a * n + b], im[a * n + b]);
  io_detail::fill(jet.dg, j, "dg", false);
  io_detail::fill(jet.d2g, j, "d2g", false);
  io_detail::fill(jet.ddg, j, "ddg", true);
  validate_jet(jet);
  return jet;
}

inline json generalized_metric_to_json(const GeneralizedMetric& G) {
  std::vector<double> re, im;
  io_detail::split_mat(G.G, re, im);
  json j;
  j["n"] = G.n;
  j["basis"] = GeneralizedMetric::basis_tag(G.n);
  j["G_re"] = re;
  j["G_im"] = im;
  return j;
}

inline GeneralizedMetric generalized_metric_from_json(const json& j) {
  for (const char* key : {"n", "basis"})
    if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  GeneralizedMetric G;
  G.n = j.at("n").get<int>();
  if (G.n < 1 || G.n > 8) throw DimensionMismatch("unsupported dimension");
  if (j.at("basis").get<std::string>() != GeneralizedMetric::basis_tag(G.n))
    throw ConfigError("unexpected basis order");
  const std::size_t m = 2 * static_cast<std::size_t>(G.n);
  const auto re = io_detail::get_array(j, "G_re", m * m);
  const auto im = io_detail::get_array(j, "G_im", m * m);
  G.G = Mat(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) G.G(a, b) = cd(re[a * m + b], im[a * m + b]);
  return G;
}

/** key = value file with [section] headers. */
class Config {
 public:
  Config() = default;
  explicit Config(boost::property_tree::ptree t) : t_(std::move(t)) {}

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse(in);
  }
  static Config parse(std::istream& in) {
    boost::property_tree::ptree t;
    try {
      boost::property_tree::read_ini(in, t);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(e.what());
    }
    return Config(std::move(t));
  }
  static Config parse_string(const std::string& s) {
    std::istringstream in(s);
    return parse(in);
  }

  bool has_section(const std::string& s) const { return t_.get_child_optional(s).has_value(); }
  bool has(const std::string& key) const { return t_.get_optional<std::string>(key).has_value(); }

  template <class T>
  T get(const std::string& key, const T& fallback) const {
    const auto raw = t_.get_optional<std::string>(key);
    if (!raw) return fallback;
    return convert<T>(key, *raw);
  }
  template <class T>
  T require(const std::string& key) const {
    const auto raw = t_.get_optional<std::string>(key);
    if (!raw) throw ConfigError("missing key '" + key + "'");
    return convert<T>(key, *raw);
  }

  /** Whitespace- or comma-separated numbers. */
  std::vector<double> numbers(const std::string& key) const {
    std::string s = require<std::string>(key);
    for (auto& c : s)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream in(s);
    std::vector<double> v;
    std::string tok;
    while (in >> tok) v.push_back(convert<double>(key, tok));
    return v;
  }

  std::vector<std::string> sections() const {
    std::vector<std::string> out;
    for (const auto& kv : t_) out.push_back(kv.first);
    return out;
  }

  const boost::property_tree::ptree& tree() const { return t_; }

 private:
  template <class T>
  static T convert(const std::string& key, const std::string& raw) {
    if constexpr (std::is_same_v<T, std::string>) {
      return raw;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (raw == "true" || raw == "1" || raw == "yes") return true;
      if (raw == "false" || raw == "0" || raw == "no") return false;
      throw ConfigError("key '" + key + "' expects a boolean");
    } else {
      std::istringstream in(raw);
      T v{};
      in >> v;
      if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("key '" + key + "' has malformed value '" + raw + "'");
      return v;
    }
  }

  boost::property_tree::ptree t_;
};

}  // namespace bismut_lab
