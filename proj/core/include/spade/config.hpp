#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spade/gcn.hpp"
#include "spade/manifold.hpp"

namespace spade {

enum class EmbedSource {
  final_model,  ///< parameters after the last epoch (the well-fitted model)
  best_model    ///< parameters frozen at the best-accuracy epoch
};

/// Everything one experiment needs; mirrors the flat key=value config file.
struct ExperimentConfig {
  std::filesystem::path dataset_dir = "data/citeseer";
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;
  std::size_t num_seeds = 1;
  bool row_normalize = false;

  GcnHyper gcn;
  KnnConfig knn;
  EmbedSource embed_source = EmbedSource::final_model;

  std::size_t eigs_s = 50;
  double eigs_tol = 1e-6;
  double prune_fraction = 0.2;
  std::vector<double> attack_rhos{0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
};

/// Parses `key=value` lines ('#' starts a comment). Unknown keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies `key=value` overrides on top of a config (same keys as the file).
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Canonical serialization: fixed key order, full-precision values. Writing
/// this text and loading it round-trips the config exactly.
std::string config_text(const ExperimentConfig& cfg);

/// FNV-1a hash of the canonical text, as 16 hex digits.
std::string config_fingerprint(const ExperimentConfig& cfg);

}  // namespace spade
