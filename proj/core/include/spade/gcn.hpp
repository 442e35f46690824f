#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "spade/dataset.hpp"
#include "spade/graph.hpp"
#include "spade/rng.hpp"

namespace spade {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct GcnHyper {
  std::size_t hidden_dim = 64;
  double dropout_rate = 0.5;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  std::size_t max_epochs = 200;
  std::uint64_t seed = 1;
};

/// Two-layer GCN: logits = Ahat * relu(Ahat * X * w0) * w1 (dropout on the
/// hidden layer in train mode).
struct GcnModel {
  Eigen::MatrixXd w0;  // d x h
  Eigen::MatrixXd w1;  // h x C
  GcnHyper hyper;
};

enum class ForwardMode { train, eval };

struct ForwardResult {
  Eigen::MatrixXd hidden;  // N x h, post-ReLU, pre-dropout
  Eigen::MatrixXd logits;  // N x C
};

struct LossGrads {
  double loss = 0.0;
  Eigen::MatrixXd grad_w0;
  Eigen::MatrixXd grad_w1;
};

struct TrainReport {
  double best_test_accuracy = 0.0;
  std::size_t best_epoch = 0;  // 1-based
  GcnModel final_model;
  GcnModel best_model;  // parameters frozen at best_epoch
  std::vector<double> test_accuracy_trace;
};

struct Evaluation {
  double accuracy = 0.0;
  Mask correct_mask;  // marks masked nodes whose argmax logit hits the label
};

/// Glorot-uniform initialization of both layers from the seeded generator.
GcnModel init_model(std::size_t num_features, std::size_t num_classes, const GcnHyper& hyper);

/// Train-mode forward samples an inverted-scaling dropout mask from rng;
/// eval mode ignores rng entirely. Throws NumericError naming the layer if
/// activations leave the finite range.
ForwardResult forward(const GcnModel& model, const SpMat& norm_adj, const SpMat& features,
                      ForwardMode mode, Rng* rng);

/// Masked-mean softmax cross-entropy over training nodes plus exact
/// gradients for the realized dropout mask. Weight decay is the optimizer's
/// job, not the loss's.
LossGrads loss_and_gradients(const GcnModel& model, const SpMat& norm_adj, const SpMat& features,
                             const std::vector<std::int32_t>& labels, const Mask& train_mask,
                             Rng* rng);

/// Full-batch Adam training; records eval-mode test accuracy after every
/// epoch and keeps the best-epoch parameters. Deterministic given the seed.
TrainReport train(const DatasetBundle& bundle, const SparseGraph& graph, const GcnHyper& hyper);

/// Eval-mode penultimate-layer activations for every node.
Eigen::MatrixXd embed(const GcnModel& model, const SparseGraph& graph, const SpMat& features);

/// Accuracy over the masked nodes; argmax ties go to the lowest class index.
Evaluation evaluate(const GcnModel& model, const SparseGraph& graph, const DatasetBundle& bundle,
                    const Mask& mask);

/// Binary checkpoint: magic "GCN1", d/h/C as little-endian u64, then w0 and
/// w1 row-major as little-endian f64.
void save_model(const GcnModel& model, const std::filesystem::path& path);
GcnModel load_model(const std::filesystem::path& path);

}  // namespace spade
