#include "spade/config.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "spade/error.hpp"
#include "textio.hpp"

namespace spade {

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError(fmt::format("{}: expected true/false, got '{}'", key, value));
}

KnnMethod parse_method(const std::string& value) {
  if (value == "auto") return KnnMethod::automatic;
  if (value == "exact") return KnnMethod::exact;
  if (value == "approximate") return KnnMethod::approximate;
  throw ValidationError(fmt::format("knn_method: expected auto/exact/approximate, got '{}'", value));
}

const char* method_name(KnnMethod m) {
  switch (m) {
    case KnnMethod::exact:
      return "exact";
    case KnnMethod::approximate:
      return "approximate";
    default:
      return "auto";
  }
}

std::vector<double> parse_rho_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    if (comma == std::string::npos) comma = value.size();
    const std::string token = value.substr(start, comma - start);
    if (!token.empty()) {
      const double rho = textio::parse_number<double>(token, key);
      if (rho < 0.0) {
        throw ValidationError(fmt::format("{}: rho {} is negative", key, rho));
      }
      out.push_back(rho);
    }
    if (comma == value.size()) break;
    start = comma + 1;
  }
  if (out.empty()) {
    throw ValidationError(fmt::format("{}: empty rho list", key));
  }
  return out;
}

}  // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "dataset") {
    cfg.dataset_dir = value;
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "seed") {
    cfg.seed = textio::parse_number<std::uint64_t>(value, key);
  } else if (key == "seeds") {
    cfg.num_seeds = textio::parse_number<std::size_t>(value, key);
    if (cfg.num_seeds < 1) throw ValidationError("seeds must be at least 1");
  } else if (key == "row_normalize") {
    cfg.row_normalize = parse_bool(value, key);
  } else if (key == "hidden") {
    cfg.gcn.hidden_dim = textio::parse_number<std::size_t>(value, key);
  } else if (key == "dropout") {
    cfg.gcn.dropout_rate = textio::parse_number<double>(value, key);
  } else if (key == "lr") {
    cfg.gcn.learning_rate = textio::parse_number<double>(value, key);
  } else if (key == "weight_decay") {
    cfg.gcn.weight_decay = textio::parse_number<double>(value, key);
  } else if (key == "epochs") {
    cfg.gcn.max_epochs = textio::parse_number<std::size_t>(value, key);
  } else if (key == "knn_k") {
    cfg.knn.k = textio::parse_number<std::size_t>(value, key);
  } else if (key == "knn_method") {
    cfg.knn.method = parse_method(value);
  } else if (key == "knn_max_links") {
    cfg.knn.max_links = textio::parse_number<std::size_t>(value, key);
  } else if (key == "knn_ef_construction") {
    cfg.knn.ef_construction = textio::parse_number<std::size_t>(value, key);
  } else if (key == "knn_ef_search") {
    cfg.knn.ef_search = textio::parse_number<std::size_t>(value, key);
  } else if (key == "embed_source") {
    if (value == "final") {
      cfg.embed_source = EmbedSource::final_model;
    } else if (value == "best") {
      cfg.embed_source = EmbedSource::best_model;
    } else {
      throw ValidationError(fmt::format("embed_source: expected final/best, got '{}'", value));
    }
  } else if (key == "eigs_s") {
    cfg.eigs_s = textio::parse_number<std::size_t>(value, key);
  } else if (key == "eigs_tol") {
    cfg.eigs_tol = textio::parse_number<double>(value, key);
  } else if (key == "prune_fraction") {
    cfg.prune_fraction = textio::parse_number<double>(value, key);
  } else if (key == "rhos") {
    cfg.attack_rhos = parse_rho_list(value, key);
  } else {
    throw ValidationError(fmt::format("unknown config key '{}'", key));
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  auto in = textio::open_input(path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    textio::strip_cr(line);
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    if (start > 0) line.erase(0, start);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(
          fmt::format("{} line {}: expected key=value, got '{}'", path.string(), lineno, line));
    }
    apply_override(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

std::string config_text(const ExperimentConfig& cfg) {
  std::string rhos;
  for (std::size_t i = 0; i < cfg.attack_rhos.size(); ++i) {
    if (i > 0) rhos.push_back(',');
    rhos += textio::full_precision(cfg.attack_rhos[i]);
  }
  return fmt::format(
      "dataset={}\n"
      "out={}\n"
      "seed={}\n"
      "seeds={}\n"
      "row_normalize={}\n"
      "hidden={}\n"
      "dropout={}\n"
      "lr={}\n"
      "weight_decay={}\n"
      "epochs={}\n"
      "knn_k={}\n"
      "knn_method={}\n"
      "knn_max_links={}\n"
      "knn_ef_construction={}\n"
      "knn_ef_search={}\n"
      "embed_source={}\n"
      "eigs_s={}\n"
      "eigs_tol={}\n"
      "prune_fraction={}\n"
      "rhos={}\n",
      cfg.dataset_dir.string(), cfg.out_dir.string(), cfg.seed, cfg.num_seeds,
      cfg.row_normalize ? "true" : "false", cfg.gcn.hidden_dim,
      textio::full_precision(cfg.gcn.dropout_rate), textio::full_precision(cfg.gcn.learning_rate),
      textio::full_precision(cfg.gcn.weight_decay), cfg.gcn.max_epochs, cfg.knn.k,
      method_name(cfg.knn.method), cfg.knn.max_links, cfg.knn.ef_construction, cfg.knn.ef_search,
      cfg.embed_source == EmbedSource::final_model ? "final" : "best", cfg.eigs_s,
      textio::full_precision(cfg.eigs_tol), textio::full_precision(cfg.prune_fraction), rhos);
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  const std::string text = config_text(cfg);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char ch : text) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", hash);
}

}  // namespace spade
