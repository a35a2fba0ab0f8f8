#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracdecay/evolve.hpp"
#include "fracdecay/model.hpp"

namespace fracdecay::scenario {

/// Validation failure with the dotted path of the offending key.
struct SchemaError : std::runtime_error {
  std::string path;
  SchemaError(std::string path_, const std::string& what_)
      : std::runtime_error(path_ + ": " + what_), path(std::move(path_)) {}
};

struct VerifySettings {
  std::vector<std::string> theorems;  // "decay_usim", "decay_ut"
  int s = 1;
  std::string regime = "auto";  // auto | lo | hi | between
  double beta_rt = 1.0;
  bool rt_square_integrable = true;
  double t0 = 0.0;
};

/// Parsed and validated scenario; problem pieces are normalized
/// (f(0) = f'(0) = 0 with q and r shifted accordingly).
struct Scenario {
  model::Problem problem;
  VerifySettings verify;
  std::uint64_t seed = 0;
  bool fast_history = false;
  double initial_radius = 0.0;
  std::string initial_profile_expr;
  std::vector<double> sweep_alphas;
  // gronwall-demo parameters
  double gr_alpha = 0.5, gr_c0 = 1.0, gr_eta0 = 1.0;
  std::string gr_phi_kind = "power";
  double gr_phi0 = 0.5, gr_c1 = 2.0;
  // mlf-table parameters
  std::vector<double> mlf_alphas{0.25, 0.4, 0.5, 0.7, 0.9};
  double mlf_x_min = 1e-3, mlf_x_max = 1e4;
  std::size_t mlf_count = 1000;
};

/// Parse a config from JSON text; throws SchemaError naming the field path.
Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

/// Built-in scenario library; returns empty optional for unknown names.
std::optional<std::string> builtin_config(const std::string& name);
std::vector<std::string> builtin_names();

/// Apply a dotted-path override (e.g. "time.nt=4000") to raw JSON text.
std::string apply_override(const std::string& json_text,
                           const std::string& assignment);

/// Serialized (normalized-key-order) echo of the raw config.
std::string canonical_echo(const std::string& json_text);

}  // namespace fracdecay::scenario
