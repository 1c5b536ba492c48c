#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <xvar/errors.hpp>
#include <xvar/estimation.hpp>
#include <xvar/spectral.hpp>
#include <xvar/subsets.hpp>

namespace xvar {

using json = nlohmann::json;

// All emitted numbers are rounded to a fixed number of significant digits
// before serialization so output files are byte-stable across platforms
// and safe to pin in golden tests.
inline double round_sig(double v, int digits = 6) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double mag = std::floor(std::log10(std::abs(v)));
  const double scale = std::pow(10.0, digits - 1 - mag);
  return std::round(v * scale) / scale;
}

inline void round_numbers(json& j, int digits = 6) {
  if (j.is_number_float()) {
    j = round_sig(j.get<double>(), digits);
  } else if (j.is_object() || j.is_array()) {
    for (auto& item : j) round_numbers(item, digits);
  }
}

inline std::string dump_json(json j, int digits = 6) {
  round_numbers(j, digits);
  return j.dump(2) + "\n";
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// Subsets appear in JSON as sorted 1-based index arrays, e.g. [1,3,7].

inline json subset_to_json(SubsetId s) {
  json arr = json::array();
  for (int j : subset_elements(s)) arr.push_back(j);
  return arr;
}

inline SubsetId subset_from_json(const json& arr, int d) {
  if (!arr.is_array() || arr.empty())
    throw InvalidInput("subset must be a non-empty array of 1-based indices");
  std::vector<int> elems;
  for (const auto& e : arr) {
    if (!e.is_number_integer())
      throw InvalidInput("subset entries must be integers");
    const int j = e.get<int>();
    if (j < 1 || j > d)
      throw InvalidInput("subset index " + std::to_string(j) +
                         " outside 1.." + std::to_string(d));
    elems.push_back(j);
  }
  return subset_from_elements(elems, d);
}

// ---------------------------------------------------------------------------
// Constraint documents:
//   {"d": 10, "xi": 0.25, "coefficients": [{"set": [1,2], "value": 1.5}, ...]}
// xi is optional (commands may supply it by flag). Singletons left out of
// the list are implied at their margin value of one.

struct ConstraintDoc {
  SubsetFamily family;
  std::optional<double> xi;
};

inline json family_to_json(const SubsetFamily& family,
                           std::optional<double> xi = std::nullopt) {
  json coeffs = json::array();
  for (std::size_t i = 0; i < family.size(); ++i)
    coeffs.push_back(
        {{"set", subset_to_json(family.sets[i])}, {"value", family.values[i]}});
  json doc{{"d", family.d}, {"coefficients", std::move(coeffs)}};
  if (xi) doc["xi"] = *xi;
  return doc;
}

inline ConstraintDoc constraints_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("d") || !doc.contains("coefficients"))
    throw InvalidInput("constraint document needs \"d\" and \"coefficients\"");
  ConstraintDoc out;
  const int d = doc.at("d").get<int>();
  check_dimension(d);
  out.family.d = d;
  for (const auto& item : doc.at("coefficients")) {
    if (!item.is_object() || !item.contains("set") || !item.contains("value"))
      throw InvalidInput("each coefficient needs \"set\" and \"value\"");
    out.family.add(subset_from_json(item.at("set"), d),
                   item.at("value").get<double>());
  }
  for (int j = 1; j <= d; ++j) {
    const SubsetId s = SubsetId{1} << (j - 1);
    if (!out.family.has(s)) out.family.add(s, 1.0);
  }
  out.family.finalize();
  if (doc.contains("xi")) out.xi = doc.at("xi").get<double>();
  return out;
}

// ---------------------------------------------------------------------------
// Spectral measures: {"d": 3, "atoms": [{"u": [...], "h": ...}, ...]}.

inline json measure_to_json(const DiscreteSpectralMeasure& H) {
  json atoms = json::array();
  for (const auto& a : H.atoms) atoms.push_back({{"u", a.u}, {"h", a.h}});
  return json{{"d", H.d}, {"atoms", std::move(atoms)}};
}

inline DiscreteSpectralMeasure measure_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("d") || !doc.contains("atoms"))
    throw InvalidInput("measure document needs \"d\" and \"atoms\"");
  DiscreteSpectralMeasure H;
  H.d = doc.at("d").get<int>();
  if (H.d < 1) throw InvalidInput("dimension must be positive");
  for (const auto& item : doc.at("atoms")) {
    if (!item.is_object() || !item.contains("u") || !item.contains("h"))
      throw InvalidInput("each atom needs \"u\" and \"h\"");
    SpectralAtom a;
    a.u = item.at("u").get<std::vector<double>>();
    a.h = item.at("h").get<double>();
    if (a.u.size() != static_cast<std::size_t>(H.d))
      throw InvalidInput("atom coordinate count must equal d");
    H.atoms.push_back(std::move(a));
  }
  return H;
}

// ---------------------------------------------------------------------------
// Estimation output: tail model plus the raw coefficient table, keyed by
// subset label: {"xi": ..., "sigma": [...], "theta": {"[1,2]": ...}}.

inline json estimates_to_json(const TailModel& model,
                              const SubsetFamily& theta,
                              const std::vector<std::string>& names = {},
                              const std::vector<double>& weights = {}) {
  json theta_map = json::object();
  for (std::size_t i = 0; i < theta.size(); ++i)
    theta_map[subset_label(theta.sets[i])] = theta.values[i];
  json doc{{"d", theta.d},
           {"xi", model.xi},
           {"sigma", model.sigma},
           {"threshold", model.threshold},
           {"p0", model.p0},
           {"theta", std::move(theta_map)}};
  if (!names.empty()) doc["names"] = names;
  if (!weights.empty()) doc["weights"] = weights;
  return doc;
}

inline SubsetFamily theta_from_estimates(const json& doc) {
  if (!doc.is_object() || !doc.contains("theta"))
    throw InvalidInput("estimates document needs a \"theta\" map");
  int d = 0;
  if (doc.contains("d")) {
    d = doc.at("d").get<int>();
  } else if (doc.contains("sigma")) {
    d = static_cast<int>(doc.at("sigma").size());
  } else {
    throw InvalidInput("estimates document needs \"d\" or \"sigma\"");
  }
  check_dimension(d);
  SubsetFamily f;
  f.d = d;
  for (const auto& [key, value] : doc.at("theta").items())
    f.add(subset_from_label(key, d), value.get<double>());
  f.finalize();
  return f;
}

// ---------------------------------------------------------------------------
// Minimal structural validator for the shipped schemas. Supports the
// keywords those schemas use: type, required, properties, items, enum,
// minimum, maximum, minItems. Throws InvalidInput with a path on failure.

namespace detail {

inline bool schema_type_matches(const json& doc, const std::string& type) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "number") return doc.is_number();
  if (type == "integer") return doc.is_number_integer();
  if (type == "boolean") return doc.is_boolean();
  if (type == "null") return doc.is_null();
  throw InvalidInput("unknown schema type " + type);
}

inline void check_schema_at(const json& doc, const json& schema,
                            const std::string& path) {
  if (schema.contains("type") &&
      !schema_type_matches(doc, schema.at("type").get<std::string>()))
    throw InvalidInput(path + ": expected " +
                       schema.at("type").get<std::string>());
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema.at("enum")) found = found || v == doc;
    if (!found) throw InvalidInput(path + ": value not in enum");
  }
  if (schema.contains("minimum") && doc.is_number() &&
      doc.get<double>() < schema.at("minimum").get<double>())
    throw InvalidInput(path + ": below minimum");
  if (schema.contains("maximum") && doc.is_number() &&
      doc.get<double>() > schema.at("maximum").get<double>())
    throw InvalidInput(path + ": above maximum");
  if (doc.is_object()) {
    if (schema.contains("required"))
      for (const auto& name : schema.at("required"))
        if (!doc.contains(name.get<std::string>()))
          throw InvalidInput(path + ": missing required field \"" +
                             name.get<std::string>() + "\"");
    if (schema.contains("properties"))
      for (const auto& [name, sub] : schema.at("properties").items())
        if (doc.contains(name))
          check_schema_at(doc.at(name), sub, path + "/" + name);
  }
  if (doc.is_array()) {
    if (schema.contains("minItems") &&
        doc.size() < schema.at("minItems").get<std::size_t>())
      throw InvalidInput(path + ": fewer than minItems entries");
    if (schema.contains("items")) {
      std::size_t i = 0;
      for (const auto& item : doc)
        check_schema_at(item, schema.at("items"), path + "/" + std::to_string(i++));
    }
  }
}

}  // namespace detail

inline void check_schema(const json& doc, const json& schema) {
  detail::check_schema_at(doc, schema, "#");
}

}  // namespace xvar
