#pragma once
/// @brief JSON experiment configuration.
///
/// {
///   "experiment": "solve-mp",
///   "domain": {"x0": 0, "y0": 0, "x1": 1, "y1": 1, "nx": 32, "ny": 32},
///   "fields": {"a": "1", "b": "1", "p": "2", "q": "4", "beta": "1"},
///   "lambda": 1,
///   "seed": 0, "tol": 1e-6, "max_iters": 500,
///   "companion": {"domain": {...}, "fields": {...}, "lambda": 1},
///   "lambda_fraction": 0.5, "k_max": 20, "count": 2, "n_path": 21,
///   "trials": 4, "restarts": 2, "samples": 20
/// }
///
/// Unknown keys are rejected at every level.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pxrobin/error.hpp"
#include "pxrobin/problem.hpp"

namespace pxrobin {

inline constexpr std::array<const char*, 8> kExperiments = {"validate",      "prop-suite", "solve-mp", "solve-ekeland",
                                                            "two-solutions", "fountain",   "oracle",   "embed-const"};

struct ExperimentConfig {
  std::string experiment;
  ProblemSpec spec;
  std::optional<ProblemSpec> companion;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iters = 500;
  std::optional<double> lambda_fraction;
  int k_max = 20;
  int count = 2;
  int n_path = 21;
  int trials = 4;
  int restarts = 2;
  int samples = 20;
  /// The document after overrides, echoed into the report.
  nlohmann::json document;
};

namespace config_detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

inline double number(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  if (!it->is_number()) throw ConfigError("'" + std::string(key) + "' in " + where + " must be a number");
  return it->get<double>();
}

inline long long integer(const json& obj, const char* key, const std::string& where, long long fallback,
                         long long min_value) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError("'" + std::string(key) + "' in " + where + " must be an integer");
  const long long v = it->get<long long>();
  if (v < min_value)
    throw ConfigError("'" + std::string(key) + "' in " + where + " must be at least " + std::to_string(min_value));
  return v;
}

inline FieldExpr field(const json& fields, const char* key, const char* fallback, const std::string& where) {
  const auto it = fields.find(key);
  std::string text = fallback;
  if (it != fields.end()) {
    if (it->is_string()) text = it->get<std::string>();
    else if (it->is_number()) text = it->dump();
    else throw ConfigError("field '" + std::string(key) + "' in " + where + " must be a string expression");
  }
  try {
    return FieldExpr::parse(text);
  } catch (const Error& e) {
    throw ConfigError("field '" + std::string(key) + "': " + e.what());
  }
}

inline ProblemSpec problem(const json& doc, const std::string& where, std::initializer_list<const char*> allowed) {
  reject_unknown(doc, allowed, where);
  ProblemSpec spec;
  const auto dom = doc.find("domain");
  if (dom == doc.end()) throw ConfigError("missing key 'domain' in " + where);
  const std::string dw = where + ".domain";
  reject_unknown(*dom, {"x0", "y0", "x1", "y1", "nx", "ny"}, dw);
  spec.domain.rect = Rect{number(*dom, "x0", dw), number(*dom, "y0", dw), number(*dom, "x1", dw), number(*dom, "y1", dw)};
  if (!(spec.domain.rect.x1 > spec.domain.rect.x0) || !(spec.domain.rect.y1 > spec.domain.rect.y0))
    throw ConfigError("domain extents must satisfy x1 > x0 and y1 > y0");
  spec.domain.nx = static_cast<std::size_t>(integer(*dom, "nx", dw, 16, 1));
  spec.domain.ny = static_cast<std::size_t>(integer(*dom, "ny", dw, 16, 1));

  const auto f = doc.find("fields");
  if (f == doc.end()) throw ConfigError("missing key 'fields' in " + where);
  const std::string fw = where + ".fields";
  reject_unknown(*f, {"a", "b", "p", "q", "beta"}, fw);
  spec.a = field(*f, "a", "1", fw);
  spec.b = field(*f, "b", "1", fw);
  spec.p = field(*f, "p", "2", fw);
  spec.q = field(*f, "q", "4", fw);
  spec.beta = field(*f, "beta", "1", fw);
  spec.lambda = number(doc, "lambda", where);
  return spec;
}

/// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace config_detail

/// Parses a configuration document. Malformed JSON is reported with its line
/// and column.
inline nlohmann::json parse_config_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports the byte just past the offending token; point at it.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = config_detail::line_column(text, byte);
    throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Builds an ExperimentConfig from a parsed document.
inline ExperimentConfig load_config(const nlohmann::json& doc) {
  using namespace config_detail;
  reject_unknown(doc,
                 {"experiment", "domain", "fields", "lambda", "seed", "tol", "max_iters", "companion",
                  "lambda_fraction", "k_max", "count", "n_path", "trials", "restarts", "samples"},
                 "config");
  ExperimentConfig cfg;
  const auto ex = doc.find("experiment");
  if (ex == doc.end() || !ex->is_string()) throw ConfigError("'experiment' must be given as a string");
  cfg.experiment = ex->get<std::string>();
  if (std::none_of(kExperiments.begin(), kExperiments.end(), [&](const char* e) { return cfg.experiment == e; }))
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");

  cfg.spec = problem(doc, "config",
                     {"experiment", "domain", "fields", "lambda", "seed", "tol", "max_iters", "companion",
                      "lambda_fraction", "k_max", "count", "n_path", "trials", "restarts", "samples"});
  if (const auto c = doc.find("companion"); c != doc.end())
    cfg.companion = problem(*c, "companion", {"domain", "fields", "lambda"});

  cfg.seed = static_cast<std::uint64_t>(integer(doc, "seed", "config", 0, 0));
  if (doc.contains("tol")) {
    cfg.tol = number(doc, "tol", "config");
    if (!(cfg.tol > 0.0)) throw ConfigError("'tol' must be positive");
  }
  cfg.max_iters = static_cast<int>(integer(doc, "max_iters", "config", 500, 1));
  if (doc.contains("lambda_fraction")) {
    cfg.lambda_fraction = number(doc, "lambda_fraction", "config");
    if (!(*cfg.lambda_fraction > 0.0)) throw ConfigError("'lambda_fraction' must be positive");
  }
  cfg.k_max = static_cast<int>(integer(doc, "k_max", "config", 20, 1));
  cfg.count = static_cast<int>(integer(doc, "count", "config", 2, 0));
  cfg.n_path = static_cast<int>(integer(doc, "n_path", "config", 21, 1));
  cfg.trials = static_cast<int>(integer(doc, "trials", "config", 4, 1));
  cfg.restarts = static_cast<int>(integer(doc, "restarts", "config", 2, 0));
  cfg.samples = static_cast<int>(integer(doc, "samples", "config", 20, 1));
  cfg.document = doc;
  return cfg;
}

/// Command-line overrides applied on top of the document.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<int> mesh_n;
};

inline nlohmann::json apply_overrides(nlohmann::json doc, const ConfigOverrides& o) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (o.seed) doc["seed"] = *o.seed;
  if (o.tol) doc["tol"] = *o.tol;
  if (o.max_iters) doc["max_iters"] = *o.max_iters;
  if (o.mesh_n) {
    for (auto* node : {&doc, doc.contains("companion") ? &doc["companion"] : nullptr}) {
      if (!node || !node->is_object() || !node->contains("domain") || !(*node)["domain"].is_object()) continue;
      (*node)["domain"]["nx"] = *o.mesh_n;
      (*node)["domain"]["ny"] = *o.mesh_n;
    }
  }
  return doc;
}

inline ExperimentConfig load_config_file(const std::string& path, const ConfigOverrides& o = {}) {
  return load_config(apply_overrides(parse_config_text(read_text_file(path)), o));
}

}  // namespace pxrobin
