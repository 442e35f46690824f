#include "spade/pipeline.hpp"

#include <chrono>

#include <fmt/format.h>

#include "spade/artifacts.hpp"
#include "spade/attack.hpp"
#include "spade/dataset.hpp"
#include "spade/error.hpp"
#include "spade/gcn.hpp"
#include "spade/laplacian.hpp"
#include "spade/manifold.hpp"
#include "spade/prune.hpp"
#include "spade/spectral.hpp"
#include "textio.hpp"

namespace spade {

namespace {

class PhaseClock {
 public:
  explicit PhaseClock(RobustnessReport& report) : report_(report) {}

  template <typename F>
  auto timed(const std::string& phase, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(phase, start);
    } else {
      auto result = f();
      record(phase, start);
      return result;
    }
  }

 private:
  void record(const std::string& phase, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report_.phase_seconds.emplace_back(phase, elapsed.count());
  }

  RobustnessReport& report_;
};

void write_trace(const std::vector<double>& trace, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  out << "epoch,test_accuracy\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << fmt::format("{},{}\n", i + 1, textio::full_precision(trace[i]));
  }
}

void write_eigs_diagnostics(const SpectralEmbedding& emb, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  out << fmt::format("s={}\nsweeps={}\ncg_iterations={}\nseed={}\nconverged={}\n", emb.s,
                     emb.diag.sweeps, emb.diag.total_cg_iterations, emb.diag.seed,
                     emb.diag.converged ? "true" : "false");
  for (std::size_t i = 0; i < emb.diag.residual_norms.size(); ++i) {
    out << fmt::format("residual_{}={}\n", i, textio::full_precision(emb.diag.residual_norms[i]));
  }
}

}  // namespace

double compute_delta(double attacked, double clean) { return attacked - clean; }

RobustnessReport run_pipeline(const ExperimentConfig& cfg) {
  RobustnessReport report;
  report.seed = cfg.seed;
  report.config_fingerprint = config_fingerprint(cfg);
  PhaseClock clock(report);

  const auto out = cfg.out_dir;
  for (const char* phase : {"train", "embed", "knn", "eigs", "score", "prune", "train_pruned",
                            "attack", "eval", "report"}) {
    std::filesystem::create_directories(out / phase);
  }

  const DatasetBundle bundle = clock.timed(
      "load", [&] { return load_dataset(cfg.dataset_dir, cfg.row_normalize); });
  const SparseGraph graph = bundle.graph();
  report.original_edge_count = graph.num_edges();

  GcnHyper hyper = cfg.gcn;
  hyper.seed = cfg.seed;

  // (1) Train on the original graph; the best-epoch parameters are frozen
  // for everything downstream.
  const TrainReport train_orig = clock.timed("train", [&] { return train(bundle, graph, hyper); });
  report.original_clean = train_orig.best_test_accuracy;
  save_model(train_orig.final_model, out / "train" / "model_final.bin");
  save_model(train_orig.best_model, out / "train" / "model_best.bin");
  write_trace(train_orig.test_accuracy_trace, out / "train" / "trace.csv");

  const Evaluation eval_orig = evaluate(train_orig.best_model, graph, bundle, bundle.test_mask);
  save_mask(eval_orig.correct_mask, out / "train" / "correct_test.txt");

  // (2) Penultimate-layer embeddings of the original-graph model. The
  // manifold and the attack both read these; the frozen best-epoch model
  // stays the evaluation subject either way.
  const GcnModel& embed_model = cfg.embed_source == EmbedSource::final_model
                                    ? train_orig.final_model
                                    : train_orig.best_model;
  const Eigen::MatrixXd embeddings =
      clock.timed("embed", [&] { return embed(embed_model, graph, bundle.features); });
  save_matrix(embeddings, out / "embed" / "embeddings.bin", kEmbeddingMagic);

  // (3) Latent-manifold k-NN graph.
  const SparseGraph manifold = clock.timed("knn", [&] { return knn_graph(embeddings, cfg.knn); });
  save_graph(manifold, out / "knn" / "manifold.graph");

  // (4) Generalized eigenpairs of (L_X, L_Y) and edge scores.
  const LaplacianOperator lx(graph, LaplacianKind::combinatorial, 0.0);
  const LaplacianOperator ly(manifold, LaplacianKind::combinatorial, pencil_regularizer(manifold));
  EigsOptions eigs_options;
  eigs_options.tol = cfg.eigs_tol;
  eigs_options.seed = cfg.seed;
  const SpectralEmbedding spectral = clock.timed(
      "eigs", [&] { return top_generalized_eigenpairs(lx, ly, cfg.eigs_s, eigs_options); });
  save_values(spectral.zetas, out / "eigs" / "zetas.txt");
  save_matrix(spectral.vs, out / "eigs" / "vs.bin", kEigenvectorMagic);
  write_eigs_diagnostics(spectral, out / "eigs" / "diagnostics.txt");

  const EdgeScoreTable scores =
      clock.timed("score", [&] { return spade_scores(spectral, graph); });
  save_scores(scores, out / "score" / "scores.txt");

  // (5) Prune the top-scoring fraction.
  const PruneResult pruned = clock.timed(
      "prune", [&] { return prune_graph(graph, scores, PruneConfig{cfg.prune_fraction}); });
  save_graph(pruned.pruned, out / "prune" / "pruned.graph");
  {
    auto removed_out = textio::open_output(out / "prune" / "removed.txt");
    for (const auto& [p, q] : pruned.removed) removed_out << fmt::format("{} {}\n", p, q);
  }
  report.pruned_edge_count = pruned.pruned.num_edges();

  // (6) Fresh training on the pruned graph, same seed and hyperparameters.
  const TrainReport train_pruned =
      clock.timed("train_pruned", [&] { return train(bundle, pruned.pruned, hyper); });
  report.pruned_clean = train_pruned.best_test_accuracy;
  save_model(train_pruned.final_model, out / "train_pruned" / "model_final.bin");
  save_model(train_pruned.best_model, out / "train_pruned" / "model_best.bin");
  write_trace(train_pruned.test_accuracy_trace, out / "train_pruned" / "trace.csv");

  // (7) One shared adversarial edge sequence, sliced per budget and applied
  // to both victims; both frozen models are evaluated without retraining.
  const std::vector<EdgePair> candidates = clock.timed("attack", [&] {
    return attack_candidate_sequence(embeddings, bundle.labels, bundle.test_mask,
                                     eval_orig.correct_mask, graph);
  });
  report.attack_valid_candidates = candidates.size();

  clock.timed("eval", [&] {
    for (const double rho : cfg.attack_rhos) {
      const AttackResult attack =
          truncate_candidates(candidates, AttackConfig{rho, report.original_edge_count});
      save_attack(attack, rho, out / "attack" / fmt::format("attack_rho_{}.txt", rho));

      const SparseGraph attacked_original = apply_attack(graph, attack);
      const SparseGraph attacked_pruned = apply_attack(pruned.pruned, attack);
      const double acc_original =
          evaluate(train_orig.best_model, attacked_original, bundle, bundle.test_mask).accuracy;
      const double acc_pruned =
          evaluate(train_pruned.best_model, attacked_pruned, bundle, bundle.test_mask).accuracy;

      report.rows.push_back({"original", rho, report.original_clean, acc_original,
                             compute_delta(acc_original, report.original_clean),
                             attack.saturated});
      report.rows.push_back({"pruned", rho, report.pruned_clean, acc_pruned,
                             compute_delta(acc_pruned, report.pruned_clean), attack.saturated});
    }
  });

  // (8) Reports.
  emit_report_csv(report, out / "report" / "report.csv");
  emit_report_markdown(report, out / "report" / "report.md");
  emit_provenance(report, out / "report" / "provenance.txt");
  return report;
}

std::vector<RobustnessReport> run_pipeline_sweep(const ExperimentConfig& cfg) {
  std::vector<RobustnessReport> reports;
  if (cfg.num_seeds == 1) {
    reports.push_back(run_pipeline(cfg));
    return reports;
  }
  for (std::size_t k = 0; k < cfg.num_seeds; ++k) {
    ExperimentConfig seed_cfg = cfg;
    seed_cfg.seed = cfg.seed + k;
    seed_cfg.num_seeds = 1;
    seed_cfg.out_dir = cfg.out_dir / fmt::format("seed_{}", seed_cfg.seed);
    reports.push_back(run_pipeline(seed_cfg));
  }
  std::filesystem::create_directories(cfg.out_dir / "report");
  emit_aggregate_csv(reports, cfg.out_dir / "report" / "aggregate.csv");
  emit_aggregate_markdown(reports, cfg.out_dir / "report" / "aggregate.md");
  return reports;
}

}  // namespace spade
