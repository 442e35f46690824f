#include <algorithm>
#include <array>
#include <string>

#include <fmt/format.h>

#include "spade/error.hpp"
#include "spade/pipeline.hpp"
#include "textio.hpp"

namespace spade {

namespace {

std::string percent(double fraction) { return fmt::format("{:.1f}", 100.0 * fraction); }

std::string signed_points(double fraction) { return fmt::format("{:+.1f}", 100.0 * fraction); }

std::string rho_label(double rho) { return fmt::format("{:.4g}%", 100.0 * rho); }

}  // namespace

void emit_report_csv(const RobustnessReport& report, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  out << "variant,rho,clean,attacked,delta,saturated\n";
  for (const auto& row : report.rows) {
    out << fmt::format("{},{},{},{},{},{}\n", row.variant, textio::full_precision(row.rho),
                       textio::full_precision(row.clean), textio::full_precision(row.attacked),
                       textio::full_precision(row.delta), row.saturated ? "true" : "false");
  }
  if (!out) {
    throw IoError(fmt::format("failed writing report to {}", path.string()));
  }
}

void emit_report_markdown(const RobustnessReport& report, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  out << "# Robustness report\n\n";
  out << fmt::format("- seed: {}\n", report.seed);
  out << fmt::format("- config: {}\n", report.config_fingerprint);
  out << fmt::format("- original graph: {} edges, clean test accuracy {}%\n",
                     report.original_edge_count, percent(report.original_clean));
  out << fmt::format("- pruned graph: {} edges, clean test accuracy {}%\n",
                     report.pruned_edge_count, percent(report.pruned_clean));
  out << fmt::format("- valid adversarial candidates: {} ({}% of the original edges)\n\n",
                     report.attack_valid_candidates,
                     fmt::format("{:.1f}", 100.0 * static_cast<double>(report.attack_valid_candidates) /
                                               static_cast<double>(report.original_edge_count)));

  out << "| Perturb. | Original clean | Original attacked | Delta | Pruned clean | Pruned "
         "attacked | Delta |\n";
  out << "|---:|---:|---:|---:|---:|---:|---:|\n";
  for (std::size_t i = 0; i + 1 < report.rows.size(); i += 2) {
    const auto& original = report.rows[i];
    const auto& pruned = report.rows[i + 1];
    out << fmt::format("| {} | {} | {} | {} | {} | {} | {} |\n", rho_label(original.rho),
                       percent(original.clean), percent(original.attacked),
                       signed_points(original.delta), percent(pruned.clean),
                       percent(pruned.attacked), signed_points(pruned.delta));
  }
  if (!out) {
    throw IoError(fmt::format("failed writing report to {}", path.string()));
  }
}

void emit_provenance(const RobustnessReport& report, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  out << fmt::format("seed={}\nconfig={}\n", report.seed, report.config_fingerprint);
  for (const auto& [phase, seconds] : report.phase_seconds) {
    out << fmt::format("time_{}={:.3f}s\n", phase, seconds);
  }
}

void emit_aggregate_csv(const std::vector<RobustnessReport>& reports,
                        const std::filesystem::path& path) {
  if (reports.empty()) {
    throw ValidationError("no reports to aggregate");
  }
  const std::size_t rows = reports.front().rows.size();
  for (const auto& r : reports) {
    if (r.rows.size() != rows) {
      throw ValidationError("reports disagree on the row layout");
    }
  }

  auto out = textio::open_output(path);
  out << "variant,rho,clean_mean,clean_min,clean_max,attacked_mean,attacked_min,attacked_max,"
         "delta_mean,delta_min,delta_max\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& proto = reports.front().rows[i];
    auto stats = [&](auto field) {
      double sum = 0.0;
      double lo = field(reports.front().rows[i]);
      double hi = lo;
      for (const auto& r : reports) {
        const double v = field(r.rows[i]);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      return std::array<double, 3>{sum / static_cast<double>(reports.size()), lo, hi};
    };
    const auto clean = stats([](const ReportRow& r) { return r.clean; });
    const auto attacked = stats([](const ReportRow& r) { return r.attacked; });
    const auto delta = stats([](const ReportRow& r) { return r.delta; });
    out << fmt::format("{},{}", proto.variant, textio::full_precision(proto.rho));
    for (const auto& triple : {clean, attacked, delta}) {
      for (const double v : triple) out << fmt::format(",{}", textio::full_precision(v));
    }
    out << '\n';
  }
}

void emit_aggregate_markdown(const std::vector<RobustnessReport>& reports,
                             const std::filesystem::path& path) {
  if (reports.empty()) {
    throw ValidationError("no reports to aggregate");
  }
  auto out = textio::open_output(path);
  out << fmt::format("# Aggregate robustness report ({} seeds)\n\n", reports.size());

  double clean_orig = 0.0;
  double clean_pruned = 0.0;
  for (const auto& r : reports) {
    clean_orig += r.original_clean;
    clean_pruned += r.pruned_clean;
  }
  clean_orig /= static_cast<double>(reports.size());
  clean_pruned /= static_cast<double>(reports.size());
  out << fmt::format("- mean clean accuracy, original graph: {}%\n", percent(clean_orig));
  out << fmt::format("- mean clean accuracy, pruned graph: {}%\n\n", percent(clean_pruned));

  out << "| Perturb. | Variant | Attacked mean | Attacked range | Delta mean |\n";
  out << "|---:|:---|---:|:---:|---:|\n";
  const std::size_t rows = reports.front().rows.size();
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& proto = reports.front().rows[i];
    double sum = 0.0;
    double delta_sum = 0.0;
    double lo = reports.front().rows[i].attacked;
    double hi = lo;
    for (const auto& r : reports) {
      if (r.rows[i].variant != proto.variant) {
        throw ValidationError("reports disagree on the row layout");
      }
      sum += r.rows[i].attacked;
      delta_sum += r.rows[i].delta;
      lo = std::min(lo, r.rows[i].attacked);
      hi = std::max(hi, r.rows[i].attacked);
    }
    const auto count = static_cast<double>(reports.size());
    out << fmt::format("| {} | {} | {} | {} .. {} | {} |\n", rho_label(proto.rho), proto.variant,
                       percent(sum / count), percent(lo), percent(hi),
                       signed_points(delta_sum / count));
  }
}

}  // namespace spade
