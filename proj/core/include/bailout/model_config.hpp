#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bailout/levy_model.hpp"

namespace bailout {

/// Parsed model file. The discount rate is optional in the file; commands
/// that need it fail if neither the file nor the command line provides it.
struct ModelConfig {
  LevyModel model;
  std::optional<double> q;
};

/// Parses a model description such as
///
///   {"drift": 1.0, "sigma": 0.5, "q": 0.1,
///    "jumps": {"type": "compound_poisson", "rate": 0.4,
///              "dist": {"type": "gamma", "shape": 1.0, "scale": 2.0}}}
///
/// Gamma laws accept either "scale" or "rate" (= 1/scale); exponential laws
/// take "mean". `jumps` may be absent, null or {"type": "none"}.
/// Throws DomainError on malformed input.
ModelConfig parse_model_config(std::string_view json_text);
ModelConfig load_model_config(const std::filesystem::path& path);

std::string to_json(const LevyModel& model);

}  // namespace bailout
