#include <algorithm>
#include <string>

#include <fmt/format.h>

#include "spade/error.hpp"
#include "spade/spectral.hpp"
#include "textio.hpp"

namespace spade {

void save_scores(const EdgeScoreTable& table, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  out << "p q score\n";
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    out << fmt::format("{} {} {}\n", table.edges[e].first, table.edges[e].second,
                       textio::full_precision(table.scores[e]));
  }
  if (!out) {
    throw IoError(fmt::format("failed writing scores to {}", path.string()));
  }
}

EdgeScoreTable load_scores(const std::filesystem::path& path) {
  auto in = textio::open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(fmt::format("{}: empty score file", path.string()));
  }
  textio::strip_cr(line);
  if (line != "p q score") {
    throw ValidationError(fmt::format("{}: unexpected header '{}'", path.string(), line));
  }

  EdgeScoreTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    textio::strip_cr(line);
    ++lineno;
    if (line.empty()) continue;
    const auto tok = textio::split_ws(line);
    const std::string ctx = fmt::format("{} line {}", path.string(), lineno);
    if (tok.size() != 3) {
      throw ValidationError(fmt::format("{}: expected 'p q score'", ctx));
    }
    table.edges.emplace_back(textio::parse_number<NodeId>(tok[0], ctx),
                             textio::parse_number<NodeId>(tok[1], ctx));
    table.scores.push_back(textio::parse_number<double>(tok[2], ctx));
  }

  table.ranking.resize(table.edges.size());
  for (std::size_t i = 0; i < table.ranking.size(); ++i) table.ranking[i] = i;
  std::sort(table.ranking.begin(), table.ranking.end(), [&](std::size_t a, std::size_t b) {
    return table.scores[a] > table.scores[b] || (table.scores[a] == table.scores[b] && a < b);
  });
  return table;
}

}  // namespace spade
