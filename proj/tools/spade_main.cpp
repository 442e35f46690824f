// Command line driver for the spectral edge-pruning toolkit. One subcommand
// per pipeline phase plus `run` for the full experiment; see README.md.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "spade/artifacts.hpp"
#include "spade/attack.hpp"
#include "spade/config.hpp"
#include "spade/convert.hpp"
#include "spade/dataset.hpp"
#include "spade/error.hpp"
#include "spade/gcn.hpp"
#include "spade/laplacian.hpp"
#include "spade/manifold.hpp"
#include "spade/pipeline.hpp"
#include "spade/prune.hpp"
#include "spade/spectral.hpp"

namespace {

namespace fs = std::filesystem;

spade::SparseGraph graph_or_dataset_edges(const std::string& graph_path,
                                          const spade::DatasetBundle& bundle) {
  if (graph_path.empty()) return bundle.graph();
  return spade::load_graph(graph_path);
}

struct TrainArgs {
  std::string dataset;
  std::string graph;
  std::string out = "out/train";
  bool row_normalize = false;
  spade::GcnHyper hyper;
};

void run_train(const TrainArgs& args) {
  const auto bundle = spade::load_dataset(args.dataset, args.row_normalize);
  const auto graph = graph_or_dataset_edges(args.graph, bundle);
  const auto report = spade::train(bundle, graph, args.hyper);
  fs::create_directories(args.out);
  spade::save_model(report.final_model, fs::path(args.out) / "model_final.bin");
  spade::save_model(report.best_model, fs::path(args.out) / "model_best.bin");
  const auto eval = spade::evaluate(report.best_model, graph, bundle, bundle.test_mask);
  spade::save_mask(eval.correct_mask, fs::path(args.out) / "correct_test.txt");
  {
    auto trace = std::ofstream(fs::path(args.out) / "trace.csv", std::ios::binary);
    trace << "epoch,test_accuracy\n";
    for (std::size_t i = 0; i < report.test_accuracy_trace.size(); ++i) {
      trace << fmt::format("{},{}\n", i + 1, report.test_accuracy_trace[i]);
    }
  }
  fmt::print("trained {} epochs: best test accuracy {:.4f} at epoch {}\n",
             report.test_accuracy_trace.size(), report.best_test_accuracy, report.best_epoch);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Spectral edge-robustness scoring, pruning, and attack evaluation"};
  app.require_subcommand(1);

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "Convert a Planetoid text dump");
  std::string convert_dump;
  std::string convert_out;
  convert_cmd->add_option("--dump", convert_dump, "Dump directory")->required();
  convert_cmd->add_option("--out", convert_out, "Dataset directory to write")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the GCN backbone");
  TrainArgs train_args;
  train_cmd->add_option("--dataset", train_args.dataset)->required();
  train_cmd->add_option("--graph", train_args.graph, "Graph file (default: dataset edges)");
  train_cmd->add_option("--out", train_args.out);
  train_cmd->add_flag("--row_normalize", train_args.row_normalize);
  train_cmd->add_option("--seed", train_args.hyper.seed);
  train_cmd->add_option("--hidden", train_args.hyper.hidden_dim);
  train_cmd->add_option("--dropout", train_args.hyper.dropout_rate);
  train_cmd->add_option("--lr", train_args.hyper.learning_rate);
  train_cmd->add_option("--weight_decay", train_args.hyper.weight_decay);
  train_cmd->add_option("--epochs", train_args.hyper.max_epochs);

  // embed
  auto* embed_cmd = app.add_subcommand("embed", "Extract penultimate-layer embeddings");
  std::string embed_dataset, embed_graph, embed_model, embed_out = "out/embed";
  embed_cmd->add_option("--dataset", embed_dataset)->required();
  embed_cmd->add_option("--graph", embed_graph);
  embed_cmd->add_option("--model", embed_model)->required();
  embed_cmd->add_option("--out", embed_out);

  // knn
  auto* knn_cmd = app.add_subcommand("knn", "Build the latent-manifold k-NN graph");
  std::string knn_embeddings, knn_out = "out/knn";
  spade::KnnConfig knn_cfg;
  std::string knn_method = "auto";
  knn_cmd->add_option("--embeddings", knn_embeddings)->required();
  knn_cmd->add_option("--out", knn_out);
  knn_cmd->add_option("--k", knn_cfg.k);
  knn_cmd->add_option("--method", knn_method)->check(CLI::IsMember({"auto", "exact", "approximate"}));
  knn_cmd->add_option("--max_links", knn_cfg.max_links);
  knn_cmd->add_option("--ef_construction", knn_cfg.ef_construction);
  knn_cmd->add_option("--ef_search", knn_cfg.ef_search);

  // eigs
  auto* eigs_cmd = app.add_subcommand("eigs", "Top generalized eigenpairs of (L_X, L_Y)");
  std::string eigs_graph, eigs_manifold, eigs_out = "out/eigs";
  std::size_t eigs_s = 50;
  double eigs_tol = 1e-6;
  std::uint64_t eigs_seed = 0x5eed1e5;
  eigs_cmd->add_option("--graph", eigs_graph)->required();
  eigs_cmd->add_option("--manifold", eigs_manifold)->required();
  eigs_cmd->add_option("--out", eigs_out);
  eigs_cmd->add_option("--s", eigs_s);
  eigs_cmd->add_option("--tol", eigs_tol);
  eigs_cmd->add_option("--seed", eigs_seed);

  // score
  auto* score_cmd = app.add_subcommand("score", "Per-edge robustness scores");
  std::string score_vs, score_graph, score_out = "out/score";
  score_cmd->add_option("--vs", score_vs, "Weighted eigenspace matrix (vs.bin)")->required();
  score_cmd->add_option("--graph", score_graph)->required();
  score_cmd->add_option("--out", score_out);

  // prune
  auto* prune_cmd = app.add_subcommand("prune", "Remove the top-scoring edge fraction");
  std::string prune_graph_path, prune_scores, prune_out = "out/prune";
  double prune_fraction = 0.2;
  prune_cmd->add_option("--graph", prune_graph_path)->required();
  prune_cmd->add_option("--scores", prune_scores)->required();
  prune_cmd->add_option("--fraction", prune_fraction);
  prune_cmd->add_option("--out", prune_out);

  // attack
  auto* attack_cmd = app.add_subcommand("attack", "Generate the model-aware edge attack");
  std::string atk_embeddings, atk_dataset, atk_correct, atk_graph, atk_out = "out/attack";
  double atk_rho = 0.05;
  attack_cmd->add_option("--embeddings", atk_embeddings)->required();
  attack_cmd->add_option("--dataset", atk_dataset)->required();
  attack_cmd->add_option("--correct", atk_correct, "Correct-test mask file")->required();
  attack_cmd->add_option("--graph", atk_graph, "Graph file (default: dataset edges)");
  attack_cmd->add_option("--rho", atk_rho);
  attack_cmd->add_option("--out", atk_out);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a mask");
  std::string eval_model, eval_dataset, eval_graph, eval_out = "out/eval";
  std::string eval_mask = "test";
  eval_cmd->add_option("--model", eval_model)->required();
  eval_cmd->add_option("--dataset", eval_dataset)->required();
  eval_cmd->add_option("--graph", eval_graph);
  eval_cmd->add_option("--mask", eval_mask)->check(CLI::IsMember({"train", "val", "test"}));
  eval_cmd->add_option("--out", eval_out);

  // run
  auto* run_cmd = app.add_subcommand("run", "Full pipeline: train, score, prune, attack, report");
  std::string run_config;
  run_cmd->add_option("--config", run_config, "key=value config file");
  const std::vector<std::string> config_keys = {
      "dataset", "out",    "seed",   "seeds",        "row_normalize", "embed_source",
      "hidden",  "dropout", "lr",    "weight_decay", "epochs",
      "knn_k",   "knn_method", "knn_max_links", "knn_ef_construction", "knn_ef_search",
      "eigs_s",  "eigs_tol", "prune_fraction", "rhos"};
  std::vector<std::string> override_values(config_keys.size());
  std::vector<CLI::Option*> override_options(config_keys.size());
  for (std::size_t i = 0; i < config_keys.size(); ++i) {
    override_options[i] =
        run_cmd->add_option("--" + config_keys[i], override_values[i], "Config override");
  }

  CLI11_PARSE(app, argc, argv);

  if (*convert_cmd) {
    const auto summary = spade::convert_planetoid_dump(convert_dump, convert_out);
    fmt::print(
        "converted: {} nodes, {} features, {} classes, {} undirected edges "
        "({} self-loop entries and {} duplicate pairs dropped), "
        "{} train / {} val / {} test, {} padded nodes\n",
        summary.nodes, summary.features, summary.classes, summary.undirected_edges,
        summary.self_loop_entries_dropped, summary.duplicate_pairs_dropped, summary.train_nodes,
        summary.val_nodes, summary.test_nodes, summary.padded_nodes);
  } else if (*train_cmd) {
    run_train(train_args);
  } else if (*embed_cmd) {
    const auto bundle = spade::load_dataset(embed_dataset);
    const auto graph = graph_or_dataset_edges(embed_graph, bundle);
    const auto model = spade::load_model(embed_model);
    const auto embeddings = spade::embed(model, graph, bundle.features);
    fs::create_directories(embed_out);
    spade::save_matrix(embeddings, fs::path(embed_out) / "embeddings.bin",
                       spade::kEmbeddingMagic);
    fmt::print("embedded {} nodes into {} dimensions\n", embeddings.rows(), embeddings.cols());
  } else if (*knn_cmd) {
    const auto embeddings = spade::load_matrix(knn_embeddings, spade::kEmbeddingMagic);
    knn_cfg.method = knn_method == "exact"         ? spade::KnnMethod::exact
                     : knn_method == "approximate" ? spade::KnnMethod::approximate
                                                   : spade::KnnMethod::automatic;
    const auto manifold = spade::knn_graph(embeddings, knn_cfg);
    fs::create_directories(knn_out);
    spade::save_graph(manifold, fs::path(knn_out) / "manifold.graph");
    fmt::print("k-NN manifold: {} nodes, {} edges\n", manifold.num_nodes(), manifold.num_edges());
  } else if (*eigs_cmd) {
    const auto graph = spade::load_graph(eigs_graph);
    const auto manifold = spade::load_graph(eigs_manifold);
    const spade::LaplacianOperator lx(graph, spade::LaplacianKind::combinatorial, 0.0);
    const spade::LaplacianOperator ly(manifold, spade::LaplacianKind::combinatorial,
                                      spade::pencil_regularizer(manifold));
    spade::EigsOptions options;
    options.tol = eigs_tol;
    options.seed = eigs_seed;
    const auto emb = spade::top_generalized_eigenpairs(lx, ly, eigs_s, options);
    fs::create_directories(eigs_out);
    spade::save_values(emb.zetas, fs::path(eigs_out) / "zetas.txt");
    spade::save_matrix(emb.vs, fs::path(eigs_out) / "vs.bin", spade::kEigenvectorMagic);
    fmt::print("eigenpairs: s={} sweeps={} cg_iterations={} zeta_max={:.6g}\n", emb.s,
               emb.diag.sweeps, emb.diag.total_cg_iterations, emb.zetas[0]);
  } else if (*score_cmd) {
    const auto graph = spade::load_graph(score_graph);
    spade::SpectralEmbedding emb;
    emb.vs = spade::load_matrix(score_vs, spade::kEigenvectorMagic);
    emb.s = static_cast<std::size_t>(emb.vs.cols());
    const auto table = spade::spade_scores(emb, graph);
    fs::create_directories(score_out);
    spade::save_scores(table, fs::path(score_out) / "scores.txt");
    fmt::print("scored {} edges\n", table.edges.size());
  } else if (*prune_cmd) {
    const auto graph = spade::load_graph(prune_graph_path);
    const auto scores = spade::load_scores(prune_scores);
    const auto result = spade::prune_graph(graph, scores, spade::PruneConfig{prune_fraction});
    fs::create_directories(prune_out);
    spade::save_graph(result.pruned, fs::path(prune_out) / "pruned.graph");
    auto removed = std::ofstream(fs::path(prune_out) / "removed.txt", std::ios::binary);
    for (const auto& [p, q] : result.removed) removed << fmt::format("{} {}\n", p, q);
    fmt::print("pruned {} of {} edges, {} remain\n", result.removed.size(), graph.num_edges(),
               result.pruned.num_edges());
  } else if (*attack_cmd) {
    const auto bundle = spade::load_dataset(atk_dataset);
    const auto graph = graph_or_dataset_edges(atk_graph, bundle);
    const auto embeddings = spade::load_matrix(atk_embeddings, spade::kEmbeddingMagic);
    const auto correct = spade::load_mask(atk_correct);
    const auto result =
        spade::generate_attack(embeddings, bundle.labels, bundle.test_mask, correct, graph,
                               spade::AttackConfig{atk_rho, graph.num_edges()});
    fs::create_directories(atk_out);
    spade::save_attack(result, atk_rho,
                       fs::path(atk_out) / fmt::format("attack_rho_{}.txt", atk_rho));
    fmt::print("attack: {} edges (saturated={}, {} valid candidates)\n",
               result.added_edges.size(), result.saturated ? "true" : "false",
               result.valid_candidate_count);
  } else if (*eval_cmd) {
    const auto bundle = spade::load_dataset(eval_dataset);
    const auto graph = graph_or_dataset_edges(eval_graph, bundle);
    const auto model = spade::load_model(eval_model);
    const auto& mask = eval_mask == "train" ? bundle.train_mask
                       : eval_mask == "val" ? bundle.val_mask
                                            : bundle.test_mask;
    const auto eval = spade::evaluate(model, graph, bundle, mask);
    fs::create_directories(eval_out);
    spade::save_mask(eval.correct_mask, fs::path(eval_out) / "correct.txt");
    auto acc = std::ofstream(fs::path(eval_out) / "accuracy.txt", std::ios::binary);
    acc << fmt::format("{}\n", eval.accuracy);
    fmt::print("{} accuracy: {:.4f}\n", eval_mask, eval.accuracy);
  } else if (*run_cmd) {
    spade::ExperimentConfig cfg;
    if (!run_config.empty()) cfg = spade::load_config(run_config);
    for (std::size_t i = 0; i < config_keys.size(); ++i) {
      if (override_options[i]->count() > 0) {
        spade::apply_override(cfg, config_keys[i], override_values[i]);
      }
    }
    const auto reports = spade::run_pipeline_sweep(cfg);
    for (const auto& report : reports) {
      fmt::print("seed {}: clean original {:.4f}, clean pruned {:.4f}, {} candidate edges\n",
                 report.seed, report.original_clean, report.pruned_clean,
                 report.attack_valid_candidates);
    }
    fmt::print("report written under {}\n", (cfg.out_dir / "report").string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const spade::NumericError& e) {
    fmt::print(stderr, "numeric error: {}\n", e.what());
    return 2;
  } catch (const spade::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
