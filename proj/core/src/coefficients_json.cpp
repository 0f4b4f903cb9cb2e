#include "frontlab/coefficients_json.hpp"

#include <initializer_list>
#include <string>

#include "frontlab/error.hpp"

namespace frontlab::coefficients {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ValidationError(where + ": unknown key '" + item.key() + "'");
  }
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing key '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ValidationError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::vector<double> numbers(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing key '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_array()) throw ValidationError(where + ": '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(where + ": '" + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

json to_json(const CoefficientSpec& spec) {
  json j;
  j["kind"] = std::string(kind_name(spec.kind()));
  switch (spec.kind()) {
    case Kind::constant:
      j["value"] = spec.value();
      break;
    case Kind::cosine: {
      j["mean"] = spec.mean();
      j["amplitude"] = spec.amplitude();
      j["phase"] = spec.phase();
      json hs = json::array();
      for (const auto& h : spec.harmonics()) {
        hs.push_back({{"amplitude", h.amplitude}, {"multiple", h.multiple}, {"phase", h.phase}});
      }
      j["harmonics"] = hs;
      break;
    }
    case Kind::piecewise_constant:
      j["breakpoints"] = spec.breakpoints();
      j["values"] = spec.values();
      break;
    case Kind::table:
      j["samples"] = spec.samples();
      break;
  }
  j["period"] = spec.period();
  return j;
}

CoefficientSpec spec_from_json(const json& j) {
  const std::string where = "coefficient spec";
  if (j.is_number()) return CoefficientSpec::constant(j.get<double>());
  if (!j.is_object()) throw ValidationError(where + ": expected an object or a number");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ValidationError(where + ": missing string key 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  CoefficientSpec spec = CoefficientSpec::constant(0.0);
  if (kind == "constant") {
    check_keys(j, {"kind", "value", "period"}, where);
    spec = CoefficientSpec::constant(number(j, "value", where));
  } else if (kind == "cosine") {
    check_keys(j, {"kind", "mean", "amplitude", "phase", "harmonics", "period"}, where);
    std::vector<Harmonic> harmonics;
    if (j.contains("harmonics")) {
      if (!j.at("harmonics").is_array()) {
        throw ValidationError(where + ": 'harmonics' must be an array");
      }
      for (const auto& h : j.at("harmonics")) {
        const std::string hw = where + " harmonic";
        check_keys(h, {"amplitude", "multiple", "phase"}, hw);
        const double multiple = number_or(h, "multiple", 1.0, hw);
        if (multiple != static_cast<int>(multiple)) {
          throw ValidationError(hw + ": 'multiple' must be an integer");
        }
        harmonics.push_back(
            {number(h, "amplitude", hw), static_cast<int>(multiple), number_or(h, "phase", 0.0, hw)});
      }
    }
    spec = CoefficientSpec::cosine(number(j, "mean", where), number_or(j, "amplitude", 0.0, where),
                                   number_or(j, "phase", 0.0, where), std::move(harmonics));
  } else if (kind == "piecewise_constant") {
    check_keys(j, {"kind", "breakpoints", "values", "period"}, where);
    spec = CoefficientSpec::piecewise_constant(numbers(j, "breakpoints", where),
                                               numbers(j, "values", where));
  } else if (kind == "table") {
    check_keys(j, {"kind", "samples", "period"}, where);
    spec = CoefficientSpec::table(numbers(j, "samples", where));
  } else {
    throw ValidationError(where + ": unknown kind '" + kind + "'");
  }
  if (j.contains("period")) spec = spec.with_period(number(j, "period", where));
  return spec;
}

json to_json(const CoefficientSet& set) {
  json j;
  j["period"] = set.period();
  for (Field f : all_fields) j[std::string(field_name(f))] = to_json(set[f]);
  return j;
}

CoefficientSet set_from_json(const json& j) {
  const std::string where = "coefficients";
  check_keys(j, {"period", "sigma", "r_u", "r_v", "kappa_u", "kappa_v", "mu_u", "mu_v"}, where);
  const double period = number(j, "period", where);
  Coefficients fields;
  for (Field f : all_fields) {
    const std::string name(field_name(f));
    if (!j.contains(name)) throw ValidationError(where + ": missing field '" + name + "'");
    const auto& entry = j.at(name);
    fields[f] = spec_from_json(entry);
    if (entry.is_object() && entry.contains("period") && fields[f].period() != period) {
      throw ValidationError(where + ": " + name + " declares a period different from the set's");
    }
  }
  return CoefficientSet(period, std::move(fields));
}

json to_json(const HomogenizedSet& h) {
  return {{"period", h.period},         {"mean_sigma", h.mean_sigma},
          {"sigma_H", h.sigma_h},       {"mean_r_u", h.mean_r_u},
          {"mean_r_v", h.mean_r_v},     {"mean_kappa_u", h.mean_kappa_u},
          {"mean_kappa_v", h.mean_kappa_v}, {"mean_mu_u", h.mean_mu_u},
          {"mean_mu_v", h.mean_mu_v}};
}

}  // namespace frontlab::coefficients
