#include "spade/gcn.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "spade/error.hpp"

namespace spade {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* layer) {
  if (!m.allFinite()) {
    throw NumericError(fmt::format("non-finite values in {}", layer));
  }
}

void check_shapes(const GcnModel& model, const SpMat& norm_adj, const SpMat& features) {
  if (features.cols() != model.w0.rows()) {
    throw DimensionError(fmt::format("features have {} columns but w0 expects {}",
                                     features.cols(), model.w0.rows()));
  }
  if (model.w0.cols() != model.w1.rows()) {
    throw DimensionError(fmt::format("w0 produces {} features but w1 expects {}", model.w0.cols(),
                                     model.w1.rows()));
  }
  if (norm_adj.rows() != features.rows() || norm_adj.cols() != features.rows()) {
    throw DimensionError(fmt::format("adjacency is {}x{} but features have {} rows",
                                     norm_adj.rows(), norm_adj.cols(), features.rows()));
  }
}

/// Intermediates of one train-mode forward, kept for the backward sweep.
struct ForwardTape {
  Eigen::MatrixXd pre_activation;  // Ahat X w0
  Eigen::MatrixXd hidden;          // relu(pre_activation)
  Eigen::MatrixXd keep_scale;      // 0 or 1/(1-rate) per hidden entry
  Eigen::MatrixXd dropped;         // hidden .* keep_scale
  Eigen::MatrixXd logits;
};

ForwardTape run_forward(const GcnModel& model, const SpMat& norm_adj, const SpMat& features,
                        ForwardMode mode, Rng* rng) {
  check_shapes(model, norm_adj, features);
  ForwardTape tape;
  tape.pre_activation = norm_adj * (features * model.w0);
  tape.hidden = tape.pre_activation.cwiseMax(0.0);
  check_finite(tape.hidden, "layer 1 (hidden)");

  const double rate = model.hyper.dropout_rate;
  if (mode == ForwardMode::train && rate > 0.0) {
    if (rng == nullptr) {
      throw ValidationError("train-mode forward needs an rng for the dropout mask");
    }
    const double scale = 1.0 / (1.0 - rate);
    tape.keep_scale.resize(tape.hidden.rows(), tape.hidden.cols());
    for (Eigen::Index i = 0; i < tape.hidden.rows(); ++i) {
      for (Eigen::Index j = 0; j < tape.hidden.cols(); ++j) {
        tape.keep_scale(i, j) = rng->uniform() < rate ? 0.0 : scale;
      }
    }
    tape.dropped = tape.hidden.cwiseProduct(tape.keep_scale);
  } else {
    tape.dropped = tape.hidden;
  }

  tape.logits = norm_adj * (tape.dropped * model.w1);
  check_finite(tape.logits, "layer 2 (logits)");
  return tape;
}

std::size_t mask_count(const Mask& mask) {
  std::size_t count = 0;
  for (const auto m : mask) count += m ? 1 : 0;
  return count;
}

// Ties go to the lowest class index.
Eigen::Index argmax_row(const Eigen::MatrixXd& logits, Eigen::Index row) {
  Eigen::Index best_index = 0;
  double best = logits(row, 0);
  for (Eigen::Index c = 1; c < logits.cols(); ++c) {
    if (logits(row, c) > best) {
      best = logits(row, c);
      best_index = c;
    }
  }
  return best_index;
}

}  // namespace

GcnModel init_model(std::size_t num_features, std::size_t num_classes, const GcnHyper& hyper) {
  if (hyper.dropout_rate < 0.0 || hyper.dropout_rate >= 1.0) {
    throw ValidationError(fmt::format("dropout rate {} outside [0, 1)", hyper.dropout_rate));
  }
  if (!(hyper.learning_rate > 0.0)) {
    throw ValidationError("learning rate must be positive");
  }
  if (hyper.max_epochs < 1) {
    throw ValidationError("max_epochs must be at least 1");
  }
  GcnModel model;
  model.hyper = hyper;
  Rng rng(hyper.seed);
  const auto d = static_cast<Eigen::Index>(num_features);
  const auto h = static_cast<Eigen::Index>(hyper.hidden_dim);
  const auto c = static_cast<Eigen::Index>(num_classes);
  model.w0.resize(d, h);
  model.w1.resize(h, c);
  const double limit0 = std::sqrt(6.0 / static_cast<double>(num_features + hyper.hidden_dim));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < h; ++j) model.w0(i, j) = rng.uniform(-limit0, limit0);
  }
  const double limit1 = std::sqrt(6.0 / static_cast<double>(hyper.hidden_dim + num_classes));
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) model.w1(i, j) = rng.uniform(-limit1, limit1);
  }
  return model;
}

ForwardResult forward(const GcnModel& model, const SpMat& norm_adj, const SpMat& features,
                      ForwardMode mode, Rng* rng) {
  ForwardTape tape = run_forward(model, norm_adj, features, mode, rng);
  return {std::move(tape.hidden), std::move(tape.logits)};
}

LossGrads loss_and_gradients(const GcnModel& model, const SpMat& norm_adj, const SpMat& features,
                             const std::vector<std::int32_t>& labels, const Mask& train_mask,
                             Rng* rng) {
  const std::size_t n = static_cast<std::size_t>(features.rows());
  if (labels.size() != n || train_mask.size() != n) {
    throw DimensionError("labels/mask length does not match feature rows");
  }
  const std::size_t train_count = mask_count(train_mask);
  if (train_count == 0) {
    throw ValidationError("training mask is empty");
  }

  ForwardTape tape = run_forward(model, norm_adj, features, ForwardMode::train, rng);
  const auto num_classes = tape.logits.cols();

  // Masked-mean softmax cross-entropy and dL/dlogits in one sweep.
  double loss = 0.0;
  Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(tape.logits.rows(), num_classes);
  const double inv_count = 1.0 / static_cast<double>(train_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (!train_mask[i]) continue;
    const auto row = tape.logits.row(static_cast<Eigen::Index>(i));
    const double row_max = row.maxCoeff();
    double sum_exp = 0.0;
    for (Eigen::Index c = 0; c < num_classes; ++c) sum_exp += std::exp(row(c) - row_max);
    const double log_sum = row_max + std::log(sum_exp);
    const auto label = static_cast<Eigen::Index>(labels[i]);
    loss += (log_sum - row(label)) * inv_count;
    for (Eigen::Index c = 0; c < num_classes; ++c) {
      const double softmax = std::exp(row(c) - log_sum);
      dlogits(static_cast<Eigen::Index>(i), c) =
          (softmax - (c == label ? 1.0 : 0.0)) * inv_count;
    }
  }

  // Ahat is symmetric, so propagating through it is another multiply by it.
  LossGrads out;
  out.loss = loss;
  const Eigen::MatrixXd dv = norm_adj * dlogits;
  out.grad_w1 = tape.dropped.transpose() * dv;
  Eigen::MatrixXd dhidden = dv * model.w1.transpose();
  if (tape.keep_scale.size() != 0) {
    dhidden = dhidden.cwiseProduct(tape.keep_scale);
  }
  const Eigen::MatrixXd dpre =
      dhidden.cwiseProduct((tape.pre_activation.array() > 0.0).cast<double>().matrix());
  out.grad_w0 = features.transpose() * (norm_adj * dpre);
  return out;
}

TrainReport train(const DatasetBundle& bundle, const SparseGraph& graph, const GcnHyper& hyper) {
  if (graph.num_nodes() != bundle.num_nodes()) {
    throw DimensionError(fmt::format("graph has {} nodes but bundle has {}", graph.num_nodes(),
                                     bundle.num_nodes()));
  }
  const SpMat norm_adj = gcn_normalized_adjacency(graph);
  const SpMat& features = bundle.features;

  GcnModel model = init_model(bundle.num_features(), bundle.num_classes, hyper);
  Rng rng(hyper.seed ^ 0x9e3779b97f4a7c15ULL);  // dropout stream, separate from init

  // Adam with classic L2: decay enters the gradient before moment updates.
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEpsilon = 1e-8;
  Eigen::MatrixXd m0 = Eigen::MatrixXd::Zero(model.w0.rows(), model.w0.cols());
  Eigen::MatrixXd v0 = m0;
  Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
  Eigen::MatrixXd v1 = m1;

  TrainReport report;
  report.test_accuracy_trace.reserve(hyper.max_epochs);

  const auto adam_step = [&](Eigen::MatrixXd& w, const Eigen::MatrixXd& grad, Eigen::MatrixXd& m,
                             Eigen::MatrixXd& v, double bias1, double bias2) {
    const Eigen::MatrixXd g = grad + hyper.weight_decay * w;
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
    w.array() -= hyper.learning_rate * (m.array() / bias1) / ((v.array() / bias2).sqrt() + kEpsilon);
  };

  for (std::size_t epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
    const LossGrads lg =
        loss_and_gradients(model, norm_adj, features, bundle.labels, bundle.train_mask, &rng);
    const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(epoch));
    const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(epoch));
    adam_step(model.w0, lg.grad_w0, m0, v0, bias1, bias2);
    adam_step(model.w1, lg.grad_w1, m1, v1, bias1, bias2);

    const ForwardResult eval_pass = forward(model, norm_adj, features, ForwardMode::eval, nullptr);
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < bundle.num_nodes(); ++i) {
      if (!bundle.test_mask[i]) continue;
      ++total;
      if (argmax_row(eval_pass.logits, static_cast<Eigen::Index>(i)) == bundle.labels[i]) {
        ++correct;
      }
    }
    const double accuracy =
        total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    report.test_accuracy_trace.push_back(accuracy);
    if (accuracy > report.best_test_accuracy || report.best_epoch == 0) {
      report.best_test_accuracy = accuracy;
      report.best_epoch = epoch;
      report.best_model = model;
    }
  }
  report.final_model = std::move(model);
  return report;
}

Eigen::MatrixXd embed(const GcnModel& model, const SparseGraph& graph, const SpMat& features) {
  const SpMat norm_adj = gcn_normalized_adjacency(graph);
  return forward(model, norm_adj, features, ForwardMode::eval, nullptr).hidden;
}

Evaluation evaluate(const GcnModel& model, const SparseGraph& graph, const DatasetBundle& bundle,
                    const Mask& mask) {
  if (mask.size() != bundle.num_nodes()) {
    throw DimensionError("mask length does not match the bundle");
  }
  if (mask_count(mask) == 0) {
    throw ValidationError("evaluation mask is empty");
  }
  const SpMat norm_adj = gcn_normalized_adjacency(graph);
  const ForwardResult pass = forward(model, norm_adj, bundle.features, ForwardMode::eval, nullptr);

  Evaluation out;
  out.correct_mask.assign(bundle.num_nodes(), 0);
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < bundle.num_nodes(); ++i) {
    if (!mask[i]) continue;
    ++total;
    if (argmax_row(pass.logits, static_cast<Eigen::Index>(i)) == bundle.labels[i]) {
      out.correct_mask[i] = 1;
      ++correct;
    }
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  return out;
}

namespace {

void write_u64(std::ofstream& out, std::uint64_t v) {
  std::array<unsigned char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(bytes.data()), 8);
}

std::uint64_t read_u64(std::ifstream& in, const std::string& context) {
  std::array<unsigned char, 8> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) {
    throw IoError(fmt::format("{}: truncated file", context));
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

void write_f64(std::ofstream& out, double d) { write_u64(out, std::bit_cast<std::uint64_t>(d)); }

double read_f64(std::ifstream& in, const std::string& context) {
  return std::bit_cast<double>(read_u64(in, context));
}

}  // namespace

void save_model(const GcnModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot open {} for writing", path.string()));
  }
  out.write("GCN1", 4);
  write_u64(out, static_cast<std::uint64_t>(model.w0.rows()));
  write_u64(out, static_cast<std::uint64_t>(model.w0.cols()));
  write_u64(out, static_cast<std::uint64_t>(model.w1.cols()));
  for (Eigen::Index i = 0; i < model.w0.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.w0.cols(); ++j) write_f64(out, model.w0(i, j));
  }
  for (Eigen::Index i = 0; i < model.w1.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.w1.cols(); ++j) write_f64(out, model.w1(i, j));
  }
  if (!out) {
    throw IoError(fmt::format("failed writing model to {}", path.string()));
  }
}

GcnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open {} for reading", path.string()));
  }
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "GCN1", 4) != 0) {
    throw ValidationError(fmt::format("{} is not a GCN1 checkpoint", path.string()));
  }
  const auto d = read_u64(in, path.string());
  const auto h = read_u64(in, path.string());
  const auto c = read_u64(in, path.string());
  GcnModel model;
  model.hyper.hidden_dim = h;
  model.w0.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(h));
  model.w1.resize(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(c));
  for (Eigen::Index i = 0; i < model.w0.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.w0.cols(); ++j) model.w0(i, j) = read_f64(in, path.string());
  }
  for (Eigen::Index i = 0; i < model.w1.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.w1.cols(); ++j) model.w1(i, j) = read_f64(in, path.string());
  }
  return model;
}

}  // namespace spade
