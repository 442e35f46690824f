#include <doctest.h>

#include <cmath>
#include <fstream>

#include <Eigen/Dense>

#include "spade/error.hpp"
#include "spade/gcn.hpp"
#include "test_support.hpp"

using namespace spade;
using spade::testing::random_instance;

namespace {

SpMat sparse_from(const Eigen::MatrixXd& dense) { return dense.sparseView(); }

/// Central finite differences of the masked cross-entropy loss with respect
/// to every weight entry, dropout disabled.
Eigen::MatrixXd fd_gradient(GcnModel model, Eigen::MatrixXd GcnModel::*weight,
                            const SpMat& norm_adj, const SpMat& features,
                            const std::vector<std::int32_t>& labels, const Mask& mask,
                            double step) {
  Eigen::MatrixXd& w = model.*weight;
  Eigen::MatrixXd grad(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const double saved = w(i, j);
      w(i, j) = saved + step;
      const double up = loss_and_gradients(model, norm_adj, features, labels, mask, nullptr).loss;
      w(i, j) = saved - step;
      const double down =
          loss_and_gradients(model, norm_adj, features, labels, mask, nullptr).loss;
      w(i, j) = saved;
      grad(i, j) = (up - down) / (2.0 * step);
    }
  }
  return grad;
}

bool gradients_close(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd, double rel) {
  for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
    for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
      const double a = analytic(i, j);
      const double f = fd(i, j);
      const double err = std::abs(a - f);
      if (err > rel * std::max({std::abs(a), std::abs(f)}) && err > 1e-10) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("forward: zero features give zero activations") {
  GcnHyper hyper;
  hyper.hidden_dim = 4;
  GcnModel model = init_model(3, 2, hyper);
  const SpMat features(5, 3);  // all zeros
  const SparseGraph g = SparseGraph::from_pairs(5, std::vector<EdgePair>{{0, 1}, {2, 3}});
  const auto result = forward(model, gcn_normalized_adjacency(g), features, ForwardMode::eval,
                              nullptr);
  CHECK(result.hidden.cwiseAbs().maxCoeff() == 0.0);
  CHECK(result.logits.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward: single-node identity example") {
  GcnHyper hyper;
  hyper.hidden_dim = 1;
  GcnModel model = init_model(1, 1, hyper);
  model.w0 << 1.0;
  model.w1 << 1.0;
  Eigen::MatrixXd feature(1, 1);
  feature << 2.0;
  const SparseGraph g = SparseGraph::from_pairs(1, {});
  const auto result =
      forward(model, gcn_normalized_adjacency(g), sparse_from(feature), ForwardMode::eval, nullptr);
  CHECK(result.hidden(0, 0) == doctest::Approx(2.0));
  CHECK(result.logits(0, 0) == doctest::Approx(2.0));
  CHECK(embed(model, g, sparse_from(feature))(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("forward matches a dense reimplementation") {
  Rng rng(19);
  const auto inst = random_instance(rng, 10, 6, 3, 8);
  GcnHyper hyper;
  hyper.hidden_dim = 5;
  hyper.seed = 99;
  const GcnModel model = init_model(6, 3, hyper);
  const SpMat norm_adj = gcn_normalized_adjacency(inst.graph);
  const auto result =
      forward(model, norm_adj, inst.bundle.features, ForwardMode::eval, nullptr);

  const Eigen::MatrixXd ahat(norm_adj);
  const Eigen::MatrixXd x(inst.bundle.features);
  const Eigen::MatrixXd hidden = (ahat * x * model.w0).cwiseMax(0.0);
  const Eigen::MatrixXd logits = ahat * hidden * model.w1;
  CHECK((result.hidden - hidden).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK((result.logits - logits).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("eval-mode forward ignores the rng") {
  Rng rng(5);
  const auto inst = random_instance(rng, 8, 4, 2, 5);
  GcnHyper hyper;
  hyper.hidden_dim = 3;
  const GcnModel model = init_model(4, 2, hyper);
  const SpMat norm_adj = gcn_normalized_adjacency(inst.graph);
  Rng a(1);
  Rng b(999);
  const auto ra = forward(model, norm_adj, inst.bundle.features, ForwardMode::eval, &a);
  const auto rb = forward(model, norm_adj, inst.bundle.features, ForwardMode::eval, &b);
  CHECK(ra.logits == rb.logits);
}

TEST_CASE("uniform logits give ln C loss") {
  Rng rng(29);
  const auto inst = random_instance(rng, 12, 4, 6, 10);
  GcnHyper hyper;
  hyper.hidden_dim = 3;
  hyper.dropout_rate = 0.0;
  GcnModel model = init_model(4, 6, hyper);
  model.w1.setZero();  // logits identically zero -> uniform softmax
  const auto lg = loss_and_gradients(model, gcn_normalized_adjacency(inst.graph),
                                     inst.bundle.features, inst.bundle.labels,
                                     inst.bundle.train_mask, nullptr);
  CHECK(lg.loss == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(std::log(6.0) == doctest::Approx(1.791759469228055));
}

TEST_CASE("loss is stable across repeated calls with dropout disabled") {
  Rng rng(31);
  const auto inst = random_instance(rng, 9, 5, 3, 6);
  GcnHyper hyper;
  hyper.hidden_dim = 4;
  hyper.dropout_rate = 0.0;
  const GcnModel model = init_model(5, 3, hyper);
  const SpMat norm_adj = gcn_normalized_adjacency(inst.graph);
  const auto first = loss_and_gradients(model, norm_adj, inst.bundle.features,
                                        inst.bundle.labels, inst.bundle.train_mask, nullptr);
  const auto second = loss_and_gradients(model, norm_adj, inst.bundle.features,
                                         inst.bundle.labels, inst.bundle.train_mask, nullptr);
  CHECK(first.loss == second.loss);
  CHECK(first.grad_w0 == second.grad_w0);

  Mask empty(inst.bundle.num_nodes(), 0);
  CHECK_THROWS_AS(loss_and_gradients(model, norm_adj, inst.bundle.features, inst.bundle.labels,
                                     empty, nullptr),
                  ValidationError);
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(37);
  const auto inst = random_instance(rng, 12, 5, 3, 10);
  GcnHyper hyper;
  hyper.hidden_dim = 4;
  hyper.dropout_rate = 0.0;
  hyper.seed = 7;
  const GcnModel model = init_model(5, 3, hyper);
  const SpMat norm_adj = gcn_normalized_adjacency(inst.graph);

  const auto lg = loss_and_gradients(model, norm_adj, inst.bundle.features, inst.bundle.labels,
                                     inst.bundle.train_mask, nullptr);
  const auto fd0 = fd_gradient(model, &GcnModel::w0, norm_adj, inst.bundle.features,
                               inst.bundle.labels, inst.bundle.train_mask, 1e-5);
  const auto fd1 = fd_gradient(model, &GcnModel::w1, norm_adj, inst.bundle.features,
                               inst.bundle.labels, inst.bundle.train_mask, 1e-5);
  CHECK(gradients_close(lg.grad_w0, fd0, 1e-4));
  CHECK(gradients_close(lg.grad_w1, fd1, 1e-4));
}

TEST_CASE("training is deterministic and tracks the best epoch") {
  Rng rng(43);
  const auto inst = random_instance(rng, 16, 6, 3, 14);
  GcnHyper hyper;
  hyper.hidden_dim = 8;
  hyper.max_epochs = 30;
  hyper.seed = 123;

  const TrainReport a = train(inst.bundle, inst.graph, hyper);
  const TrainReport b = train(inst.bundle, inst.graph, hyper);
  CHECK(a.test_accuracy_trace == b.test_accuracy_trace);
  CHECK(a.final_model.w0 == b.final_model.w0);
  CHECK(a.final_model.w1 == b.final_model.w1);
  CHECK(a.best_model.w0 == b.best_model.w0);

  const double max_trace =
      *std::max_element(a.test_accuracy_trace.begin(), a.test_accuracy_trace.end());
  CHECK(a.best_test_accuracy == max_trace);
  CHECK(a.test_accuracy_trace[a.best_epoch - 1] == a.best_test_accuracy);

  // The stored best model reproduces the recorded accuracy when re-evaluated.
  const auto eval = evaluate(a.best_model, inst.graph, inst.bundle, inst.bundle.test_mask);
  CHECK(eval.accuracy == doctest::Approx(a.best_test_accuracy).epsilon(1e-12));
}

TEST_CASE("single-epoch training has a one-entry trace") {
  Rng rng(47);
  const auto inst = random_instance(rng, 10, 4, 2, 6);
  GcnHyper hyper;
  hyper.hidden_dim = 3;
  hyper.max_epochs = 1;
  const TrainReport report = train(inst.bundle, inst.graph, hyper);
  CHECK(report.test_accuracy_trace.size() == 1);
  CHECK(report.best_epoch == 1);
}

TEST_CASE("permuting w1 columns permutes logit columns") {
  Rng rng(53);
  const auto inst = random_instance(rng, 8, 4, 3, 6);
  GcnHyper hyper;
  hyper.hidden_dim = 4;
  GcnModel model = init_model(4, 3, hyper);
  const SpMat norm_adj = gcn_normalized_adjacency(inst.graph);
  const auto base = forward(model, norm_adj, inst.bundle.features, ForwardMode::eval, nullptr);

  GcnModel permuted = model;
  permuted.w1.col(0) = model.w1.col(2);
  permuted.w1.col(1) = model.w1.col(0);
  permuted.w1.col(2) = model.w1.col(1);
  const auto rotated =
      forward(permuted, norm_adj, inst.bundle.features, ForwardMode::eval, nullptr);
  CHECK(rotated.logits.col(0) == base.logits.col(2));
  CHECK(rotated.logits.col(1) == base.logits.col(0));
  CHECK(rotated.logits.col(2) == base.logits.col(1));
}

TEST_CASE("evaluate: argmax ties go to the lowest class") {
  Rng rng(59);
  const auto inst = random_instance(rng, 10, 4, 3, 6);
  GcnHyper hyper;
  hyper.hidden_dim = 3;
  GcnModel model = init_model(4, 3, hyper);
  model.w1.setZero();  // all logits equal -> every prediction is class 0

  const auto eval = evaluate(model, inst.graph, inst.bundle, inst.bundle.test_mask);
  std::size_t zeros = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < inst.bundle.num_nodes(); ++i) {
    if (!inst.bundle.test_mask[i]) continue;
    ++total;
    if (inst.bundle.labels[i] == 0) ++zeros;
    CHECK(eval.correct_mask[i] == (inst.bundle.labels[i] == 0 ? 1 : 0));
  }
  CHECK(eval.accuracy ==
        doctest::Approx(static_cast<double>(zeros) / static_cast<double>(total)));

  Mask empty(inst.bundle.num_nodes(), 0);
  CHECK_THROWS_AS(evaluate(model, inst.graph, inst.bundle, empty), ValidationError);
}

TEST_CASE("evaluate: perfect one-hot logits give accuracy 1") {
  // Edgeless graph so the propagation operator is the identity; one-hot
  // features pass straight through identity weights.
  const std::size_t n = 6;
  DatasetBundle bundle;
  bundle.num_classes = 3;
  Eigen::MatrixXd feats = Eigen::MatrixXd::Zero(n, 3);
  bundle.labels.resize(n);
  bundle.train_mask.assign(n, 1);
  bundle.val_mask.assign(n, 0);
  bundle.test_mask.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    bundle.labels[i] = static_cast<std::int32_t>(i % 3);
    feats(static_cast<Eigen::Index>(i), i % 3) = 1.0;
  }
  bundle.features = feats.sparseView();
  const SparseGraph g = SparseGraph::from_pairs(n, {});

  GcnHyper hyper;
  hyper.hidden_dim = 3;
  GcnModel model = init_model(3, 3, hyper);
  model.w0 = Eigen::MatrixXd::Identity(3, 3);
  model.w1 = Eigen::MatrixXd::Identity(3, 3);
  const auto eval = evaluate(model, g, bundle, bundle.train_mask);
  CHECK(eval.accuracy == 1.0);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  GcnHyper hyper;
  hyper.hidden_dim = 5;
  hyper.seed = 77;
  const GcnModel model = init_model(7, 4, hyper);
  const auto dir = testing::temp_dir("gcn_checkpoint");
  save_model(model, dir / "model.bin");
  const GcnModel loaded = load_model(dir / "model.bin");
  CHECK(loaded.w0 == model.w0);
  CHECK(loaded.w1 == model.w1);
  CHECK(loaded.w0.rows() == 7);
  CHECK(loaded.w1.cols() == 4);

  std::ofstream bad(dir / "bad.bin", std::ios::binary);
  bad << "NOPE";
  bad.close();
  CHECK_THROWS_AS(load_model(dir / "bad.bin"), ValidationError);
}

TEST_CASE("shape mismatches are reported as dimension errors") {
  GcnHyper hyper;
  hyper.hidden_dim = 3;
  const GcnModel model = init_model(4, 2, hyper);
  const SparseGraph g = SparseGraph::from_pairs(3, std::vector<EdgePair>{{0, 1}});
  const SpMat wrong_features(3, 9);
  CHECK_THROWS_AS(
      forward(model, gcn_normalized_adjacency(g), wrong_features, ForwardMode::eval, nullptr),
      DimensionError);
}
