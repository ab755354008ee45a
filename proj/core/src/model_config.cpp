#include "bailout/model_config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bailout/errors.hpp"

namespace bailout {

namespace {

using nlohmann::json;

double number(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    throw DomainError(std::string("model config: missing numeric field '") +
                      key + "'");
  return it->get<double>();
}

JumpDist parse_dist(const json& dist) {
  if (!dist.is_object()) throw DomainError("model config: 'dist' must be an object");
  const std::string type = dist.value("type", "");
  if (type == "exponential") return ExponentialJumps{number(dist, "mean")};
  if (type == "gamma") {
    const double shape = number(dist, "shape");
    const bool has_scale = dist.contains("scale");
    const bool has_rate = dist.contains("rate");
    if (has_scale == has_rate)
      throw DomainError(
          "model config: gamma law needs exactly one of 'scale' or 'rate'");
    if (has_scale) return GammaJumps{shape, number(dist, "scale")};
    const double rate = number(dist, "rate");
    if (!(rate > 0)) throw DomainError("model config: gamma rate must be positive");
    return GammaJumps{shape, 1.0 / rate};
  }
  throw DomainError("model config: unknown jump distribution type '" + type + "'");
}

}  // namespace

ModelConfig parse_model_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("model config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DomainError("model config: top level must be an object");

  std::optional<CompoundPoisson> jumps;
  if (auto it = doc.find("jumps"); it != doc.end() && !it->is_null()) {
    const std::string type = it->value("type", "");
    if (type == "compound_poisson") {
      auto dist = it->find("dist");
      if (dist == it->end()) throw DomainError("model config: jumps need a 'dist'");
      jumps = CompoundPoisson{number(*it, "rate"), parse_dist(*dist)};
    } else if (type != "none") {
      throw DomainError("model config: unknown jumps type '" + type + "'");
    }
  }

  std::optional<double> q;
  if (auto it = doc.find("q"); it != doc.end() && !it->is_null()) {
    if (!it->is_number()) throw DomainError("model config: 'q' must be a number");
    q = it->get<double>();
    if (!(*q > 0)) throw DomainError("model config: 'q' must be positive");
  }

  return ModelConfig{LevyModel(number(doc, "drift"), number(doc, "sigma"), jumps),
                     q};
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("model config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_config(buf.str());
}

std::string to_json(const LevyModel& model) {
  json doc = {{"drift", model.drift()}, {"sigma", model.sigma()}};
  if (const auto& j = model.jumps()) {
    json dist = std::visit(
        [](const auto& d) -> json {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ExponentialJumps>)
            return {{"type", "exponential"}, {"mean", d.mean}};
          else
            return {{"type", "gamma"}, {"shape", d.shape}, {"scale", d.scale}};
        },
        j->dist);
    doc["jumps"] = {{"type", "compound_poisson"}, {"rate", j->rate}, {"dist", dist}};
  } else {
    doc["jumps"] = nullptr;
  }
  return doc.dump();
}

}  // namespace bailout
