#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "cmc/families.hpp"
#include "cmc/foliation.hpp"
#include "cmc/geometry.hpp"
#include "cmc/solver.hpp"

namespace cmc {

/// A run configuration. JSON layout (every block optional):
///
///   { "spacetime":  { "family": "counterexample", "epsilon": 0.8, "n": 2,
///                     "interval": [lo, hi], "warp": "...", "psi": "...", "sigma": "..." },
///     "grid":       { "size": 256, "model": "auto" | "grid" | "homogeneous" },
///     "tau":        { "min": -2, "max": 2, "steps": 81 },
///     "tolerances": { "newton": 1e-10, "degeneracy": 1e-8, "gradient": 1e-6, "dtau_min": 1e-6 },
///     "tcc":        { "samples": 10000, "seed": 1 },
///     "output":     { "dir": "out", "format": "csv" | "json", "plot": "foliation.svg" } }
struct RunConfig {
  FamilyParams spacetime;
  Eigen::Index grid_size = 256;
  ModelKind model = ModelKind::kAuto;
  double tau_min = -1.0;
  double tau_max = 1.0;
  int steps = 41;
  double newton_tol = 0.0;  // 0: the model default
  double degeneracy = kDegeneracyFactor;
  double gradient = kGradientThreshold;
  double dtau_min = 1e-6;
  std::size_t tcc_samples = 10000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "csv";
  std::optional<std::string> plot;

  SweepOptions sweep_options() const;
};

/// Validates and converts; ConfigError names the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Re-checks the invariants (after command-line overrides).
void validate(const RunConfig& c);

nlohmann::json to_json(const RunConfig& c);

/// Serializes with every floating value printed as %.17g; NaN/∞ become null.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// %.17g; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

nlohmann::json to_json(const Foliation& fol);
nlohmann::json to_json(const TimeFunctionReport& rep, bool with_fields = false);
nlohmann::json to_json(const PhiSummary& phi);
nlohmann::json to_json(const TccReport& rep);
nlohmann::json to_json(const SliceGraph& slice, const SliceModel& model, const std::optional<SliceVelocity>& vel);

/// foliation.csv: one row per requested τ.
std::string foliation_csv(const Foliation& fol);
/// τ against mean leaf time, degenerate slices marked.
std::string foliation_svg(const Foliation& fol, const std::string& title);

/// IoError when the file cannot be written or read.
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace cmc
