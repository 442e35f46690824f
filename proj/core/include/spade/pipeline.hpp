#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "spade/config.hpp"

namespace spade {

struct ReportRow {
  std::string variant;  // "original" | "pruned"
  double rho = 0.0;
  double clean = 0.0;
  double attacked = 0.0;
  double delta = 0.0;  // attacked - clean, exactly
  bool saturated = false;
};

struct RobustnessReport {
  double original_clean = 0.0;
  double pruned_clean = 0.0;
  std::vector<ReportRow> rows;  // one per (rho, variant), original first
  std::size_t original_edge_count = 0;
  std::size_t pruned_edge_count = 0;
  std::size_t attack_valid_candidates = 0;
  std::uint64_t seed = 0;
  std::string config_fingerprint;
  std::vector<std::pair<std::string, double>> phase_seconds;  // provenance only
};

double compute_delta(double attacked, double clean);

/// Runs the eight phases end to end, writing every intermediate artifact
/// under <out>/<phase>/ and the report under <out>/report/.
RobustnessReport run_pipeline(const ExperimentConfig& cfg);

/// Runs cfg.num_seeds pipelines (seed, seed+1, ...). With more than one
/// seed, per-seed artifacts land under <out>/seed_<k>/ and an aggregate
/// report (mean and range per cell) under <out>/report/.
std::vector<RobustnessReport> run_pipeline_sweep(const ExperimentConfig& cfg);

/// CSV: header `variant,rho,clean,attacked,delta,saturated`, full-precision
/// fractions. Byte-deterministic given the report.
void emit_report_csv(const RobustnessReport& report, const std::filesystem::path& path);

/// Markdown table in the paper-style layout (percent, one decimal).
void emit_report_markdown(const RobustnessReport& report, const std::filesystem::path& path);

/// Seed, config fingerprint, and per-phase wall times. Not deterministic.
void emit_provenance(const RobustnessReport& report, const std::filesystem::path& path);

/// Mean and min/max range across per-seed reports, same row layout.
void emit_aggregate_csv(const std::vector<RobustnessReport>& reports,
                        const std::filesystem::path& path);
void emit_aggregate_markdown(const std::vector<RobustnessReport>& reports,
                             const std::filesystem::path& path);

}  // namespace spade
