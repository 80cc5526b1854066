#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ricci/errors.hpp"
#include "ricci/iteration.hpp"

namespace ricci {

/// One explicit mode of initial or synthetic data.
/// Sphere: amplitude·P_l. Torus: amplitude·cos(kx·2πx/L1 + ky·2πy/L2), or
/// sin when sine is set.
struct ModeSpec {
  int l = 0;
  int kx = 0;
  int ky = 0;
  bool sine = false;
  double amplitude = 0.0;
};

/// Band-limited random data, rescaled so that its sup norm is amplitude.
struct RandomSpec {
  int band = 4;
  double amplitude = 0.1;
  std::uint64_t seed = 0;
};

struct DataSpec {
  std::vector<ModeSpec> modes;
  std::optional<RandomSpec> random;
  bool empty() const { return modes.empty() && !random; }
};

struct OutputSpec {
  std::string dir = "ricci-out";
  bool csv = true;
  bool jsonl = true;
  bool svg = false;
};

struct RunConfig {
  IterationConfig iteration;
  DataSpec initial;
  DataSpec synthetic_f;
  /// Inverse Ricci target h = 1 + Σ a_l P_l (l ≥ 1) or a field file.
  DataSpec target;
  std::string target_file;
  /// Stored potential for the green subcommand; ψ₀ when empty.
  std::string state_file;
  OutputSpec output;
  bool oracle_mode = false;
};

/// All violations found in a configuration, in document order.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Parses and validates a JSON run description. Relative file paths are
/// resolved against base_dir. Throws ConfigError listing every violation.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");

/// Builds a field from explicit modes or seeded random data.
Field build_data(const Backend& backend, const DataSpec& spec);

/// Sphere Legendre mode P_l or torus Fourier mode on the backend grid.
Field mode_field(const Backend& backend, const ModeSpec& mode);

/// Seeded band-limited field with sup norm spec.amplitude.
Field random_field(const Backend& backend, const RandomSpec& spec);

/// Shifts f by a constant so that ∫exp(f) dA = V.
Field normalize_ricci_potential(const Field& f);

}  // namespace ricci
