// Copyright 2026 The TRTC Beamforming Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Configuration files (TOML or JSON, chosen by extension) and `key=value`
// overrides. User-facing keys carry dB units; SystemConfig stores linear
// values and the conversion happens here only.
//
// Requires nlohmann/json and toml++ on the include path (target trtc::io).

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <toml++/toml.hpp>

#include "trtc/experiments.hpp"
#include "trtc/system_model.hpp"
#include "trtc/types.hpp"

namespace trtc {

using Json = nlohmann::json;

struct RunConfig {
  SystemConfig system;
  SweepSpec sweep;
  int threads = 0;  // 0: hardware concurrency
};

namespace detail {

inline Json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    Json out = Json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = toml_to_json(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    Json out = Json::array();
    for (const auto& value : *a) out.push_back(toml_to_json(value));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw ConfigError("<file>", "unsupported TOML value type (dates are not accepted)");
}

inline double as_number(const Json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError(field, "expected a number");
}

inline int as_int(const Json& v, const std::string& field) {
  const double d = as_number(v, field);
  if (!std::isfinite(d) || d != std::floor(d) || std::abs(d) > 1e9)
    throw ConfigError(field, "expected an integer");
  return static_cast<int>(d);
}

inline std::string as_string(const Json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> as_number_list(const Json& v, const std::string& field) {
  std::vector<double> out;
  if (!v.is_array()) {
    out.push_back(as_number(v, field));
    return out;
  }
  for (const auto& e : v) out.push_back(as_number(e, field));
  return out;
}

}  // namespace detail

// Applies one system key. Unknown keys are rejected.
inline void apply_system_key(SystemConfig& cfg, const std::string& key, const Json& v) {
  using namespace detail;
  if (key == "num_cells") {
    cfg.num_cells = as_int(v, key);
  } else if (key == "users_per_cell") {
    cfg.users_per_cell = as_int(v, key);
  } else if (key == "num_units") {
    cfg.num_units = as_int(v, key);
  } else if (key == "unit_power_dBm") {
    cfg.unit_power = dbm_to_watt(as_number(v, key));
  } else if (key == "noise_power_dBm") {
    if (v.is_array()) {
      cfg.per_user_noise.clear();
      for (double d : as_number_list(v, key)) cfg.per_user_noise.push_back(dbm_to_watt(d));
    } else {
      cfg.per_user_noise.clear();
      cfg.noise_power = dbm_to_watt(as_number(v, key));
    }
  } else if (key == "pathloss_ref_dB") {
    cfg.pathloss_ref = db_to_linear(as_number(v, key));
  } else if (key == "pathloss_exponent") {
    cfg.pathloss_exponent = as_number(v, key);
  } else if (key == "rician_factor_dB") {
    cfg.rician_factor = db_to_linear(as_number(v, key));
  } else if (key == "trtc_positions") {
    cfg.trtc_positions.clear();
    if (!v.is_array()) throw ConfigError(key, "expected a list of [x, y, z]");
    for (const auto& p : v) {
      const auto xyz = as_number_list(p, key);
      if (!p.is_array() || xyz.size() != 3) throw ConfigError(key, "each entry needs [x, y, z]");
      cfg.trtc_positions.push_back({xyz[0], xyz[1], xyz[2]});
    }
  } else if (key == "site_spacing") {
    cfg.site_spacing = as_number(v, key);
  } else if (key == "trtc_height") {
    cfg.trtc_height = as_number(v, key);
  } else if (key == "cell_radius") {
    cfg.cell_radius = as_number(v, key);
  } else if (key == "user_height") {
    cfg.user_height = as_number(v, key);
  } else if (key == "array") {
    const auto s = as_string(v, key);
    if (s == "ula") cfg.array = ArrayGeometry::kUla;
    else if (s == "upa") cfg.array = ArrayGeometry::kUpa;
    else throw ConfigError(key, "expected 'ula' or 'upa'");
  } else if (key == "smoothing_mu") {
    cfg.smoothing_mu = as_number(v, key);
  } else if (key == "mu_schedule") {
    const auto s = as_string(v, key);
    if (s == "fixed") cfg.mu_schedule = MuSchedule::kFixed;
    else if (s == "geometric") cfg.mu_schedule = MuSchedule::kGeometric;
    else throw ConfigError(key, "expected 'fixed' or 'geometric'");
  } else if (key == "mu_growth") {
    cfg.mu_growth = as_number(v, key);
  } else if (key == "mu_max") {
    cfg.mu_max = as_number(v, key);
  } else if (key == "max_outer_iters") {
    cfg.max_outer_iters = as_int(v, key);
  } else if (key == "convergence_tol") {
    cfg.convergence_tol = as_number(v, key);
  } else if (key == "max_backtracks") {
    cfg.max_backtracks = as_int(v, key);
  } else if (key == "seed") {
    const double d = as_number(v, key);
    if (!(d >= 0.0) || d != std::floor(d) || d > 9.007199254740992e15)
      throw ConfigError(key, "expected a non-negative integer");
    cfg.rng_seed = static_cast<std::uint64_t>(d);
  } else if (key == "init") {
    const auto s = as_string(v, key);
    if (s == "matched_filter") cfg.init = InitPolicy::kMatchedFilter;
    else if (s == "random") cfg.init = InitPolicy::kRandom;
    else throw ConfigError(key, "expected 'matched_filter' or 'random'");
  } else {
    throw ConfigError(key, "unknown configuration key");
  }
}

inline void apply_sweep_key(SweepSpec& spec, const std::string& key, const Json& v) {
  using namespace detail;
  const std::string field = "sweep." + key;
  if (key == "param") {
    spec.param = as_string(v, field);
  } else if (key == "values") {
    spec.values = as_number_list(v, field);
  } else if (key == "trials") {
    spec.trials = as_int(v, field);
  } else if (key == "schemes") {
    spec.schemes.clear();
    if (v.is_array()) {
      for (const auto& s : v) spec.schemes.push_back(parse_scheme(as_string(s, field)));
    } else {
      spec.schemes.push_back(parse_scheme(as_string(v, field)));
    }
  } else if (key == "output") {
    spec.output = as_string(v, field);
  } else {
    throw ConfigError(field, "unknown configuration key");
  }
}

// Document layout: system keys at top level or under [system]; sweep keys
// under [sweep]; `threads` at top level.
inline RunConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "configuration must be a table/object");
  RunConfig rc;
  for (const auto& [key, value] : doc.items()) {
    if (key == "system") {
      if (!value.is_object()) throw ConfigError("system", "expected a table");
      for (const auto& [k, v] : value.items()) apply_system_key(rc.system, k, v);
    } else if (key == "sweep") {
      if (!value.is_object()) throw ConfigError("sweep", "expected a table");
      for (const auto& [k, v] : value.items()) apply_sweep_key(rc.sweep, k, v);
    } else if (key == "threads") {
      rc.threads = detail::as_int(value, key);
      if (rc.threads < 0) throw ConfigError(key, "must be >= 0");
    } else {
      apply_system_key(rc.system, key, value);
    }
  }
  return rc;
}

inline Json parse_config_text(const std::string& text, const std::string& format) {
  if (format == "json") {
    try {
      return Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ConfigError("<file>", std::string("JSON parse error: ") + e.what());
    }
  }
  if (format == "toml") {
    try {
      return detail::toml_to_json(toml::parse(text));
    } catch (const toml::parse_error& e) {
      std::ostringstream msg;
      msg << "TOML parse error: " << e.description() << " at " << e.source().begin;
      throw ConfigError("<file>", msg.str());
    }
  }
  throw ConfigError("<file>", "unknown config format '" + format + "'");
}

inline Json load_config_document(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::string format;
  if (ext == ".json") format = "json";
  else if (ext == ".toml") format = "toml";
  else throw ConfigError("--config", "expected a .toml or .json file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), format);
}

// `key=value`; dotted keys address nested tables. The value is read as JSON
// when it parses, otherwise as a bare string.
inline void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(assignment, "override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError(key, "empty key component");
    if (!node->is_object()) throw ConfigError(key, "cannot index into a non-table value");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

}  // namespace trtc
