#include "spotquart/config.hpp"

#include <set>

#include <json.hpp>

#include "spotquart/errors.hpp"

namespace spotquart {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + key, "missing required field");
  if (!it->is_number()) fail(path + key, "expected a number");
  return it->get<double>();
}

double get_number_or(const json& obj, const std::string& path, const std::string& key,
                     double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) fail(path + key, "expected a number");
  return it->get<double>();
}

long get_integer(const json& obj, const std::string& path, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + key, "missing required field");
  if (!it->is_number_integer()) fail(path + key, "expected an integer");
  return it->get<long>();
}

bool get_bool_or(const json& obj, const std::string& path, const std::string& key,
                 bool fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) fail(path + key, "expected a boolean");
  return it->get<bool>();
}

ModelSpec parse_model(const json& obj) {
  if (!obj.is_object()) fail("model", "expected an object");
  const auto type_it = obj.find("type");
  if (type_it == obj.end()) fail("model.type", "missing required field");
  if (!type_it->is_string()) fail("model.type", "expected a string");
  const std::string type = type_it->get<std::string>();

  ModelSpec model;
  model.drift = DriftSpec::constant(get_number_or(obj, "model.", "drift", 0.0));
  if (type == "constant") {
    reject_unknown_keys(obj, "model", {"type", "c", "drift"});
    model.vol = VolatilitySpec::constant(get_number(obj, "model.", "c"));
  } else if (type == "sinusoid") {
    reject_unknown_keys(obj, "model", {"type", "base", "amp", "period", "drift"});
    model.vol = VolatilitySpec::sinusoid(get_number(obj, "model.", "base"),
                                         get_number(obj, "model.", "amp"),
                                         get_number(obj, "model.", "period"));
  } else if (type == "heston") {
    reject_unknown_keys(obj, "model",
                        {"type", "kappa", "theta", "xi", "rho", "c0", "drift"});
    model.vol = VolatilitySpec::heston(
        get_number(obj, "model.", "kappa"), get_number(obj, "model.", "theta"),
        get_number(obj, "model.", "xi"), get_number(obj, "model.", "rho"),
        get_number(obj, "model.", "c0"));
  } else {
    fail("model.type", "unknown model '" + type + "' (constant, sinusoid, heston)");
  }
  model.validate();
  return model;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");

  reject_unknown_keys(doc, "",
                      {"model", "t", "n", "M", "seed", "substeps", "kn", "estimators",
                       "alpha", "coverage", "decomposition", "log_price", "histogram",
                       "qq", "samples"});

  std::string missing;
  for (const char* key : {"model", "t", "n", "M", "seed"}) {
    if (!doc.contains(key)) missing += missing.empty() ? key : std::string(", ") + key;
  }
  if (!missing.empty())
    throw ConfigError("config: missing required fields: " + missing);

  RunConfig cfg;
  cfg.mc.model = parse_model(doc["model"]);

  cfg.mc.sampling.horizon = get_number(doc, "", "t");
  cfg.mc.sampling.n = get_integer(doc, "", "n");
  cfg.mc.replications = get_integer(doc, "", "M");

  const auto& seed = doc["seed"];
  if (!seed.is_number_integer() && !seed.is_number_unsigned())
    throw ConfigError("config: seed: expected a 64-bit integer");
  cfg.mc.master_seed = seed.get<std::uint64_t>();

  const bool heston = cfg.mc.model.vol.kind == VolatilitySpec::Kind::Heston;
  cfg.mc.sampling.substeps =
      static_cast<int>(doc.contains("substeps") ? get_integer(doc, "", "substeps")
                                                : (heston ? 10 : 1));

  if (doc.contains("kn")) {
    const auto& kn = doc["kn"];
    if (!kn.is_object()) throw ConfigError("config: kn: expected an object");
    reject_unknown_keys(kn, "kn", {"theta", "gamma"});
    cfg.mc.kn_rule.theta = get_number_or(kn, "kn.", "theta", 1.0);
    cfg.mc.kn_rule.gamma = get_number_or(kn, "kn.", "gamma", 0.4);
  }

  if (doc.contains("estimators")) {
    const auto& est = doc["estimators"];
    if (!est.is_array() || est.empty())
      throw ConfigError("config: estimators: expected a non-empty array of names");
    for (const auto& item : est) {
      if (!item.is_string())
        throw ConfigError("config: estimators: expected estimator names as strings");
      cfg.mc.estimators.push_back(EstimatorSpec::parse(item.get<std::string>()));
    }
  } else {
    cfg.mc.estimators = EstimatorSpec::default_set();
  }

  cfg.alpha = get_number_or(doc, "", "alpha", 0.05);
  cfg.mc.alpha = cfg.alpha;
  cfg.mc.coverage = get_bool_or(doc, "", "coverage", false);
  cfg.mc.decomposition = get_bool_or(doc, "", "decomposition", false);
  cfg.log_price = get_bool_or(doc, "", "log_price", false);
  cfg.emit.histogram = get_bool_or(doc, "", "histogram", false);
  cfg.emit.qq = get_bool_or(doc, "", "qq", false);
  cfg.emit.samples = get_bool_or(doc, "", "samples", false);

  cfg.mc.validate();
  return cfg;
}

}  // namespace spotquart
