#include "spade/artifacts.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "spade/error.hpp"
#include "textio.hpp"

namespace spade {

namespace {

void write_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t read_u64(std::ifstream& in, const std::string& context) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw IoError(fmt::format("{}: truncated file", context));
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void save_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path,
                 const std::string& magic) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot open {} for writing", path.string()));
  }
  out.write(magic.data(), 4);
  write_u64(out, static_cast<std::uint64_t>(m.rows()));
  write_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      write_u64(out, std::bit_cast<std::uint64_t>(m(i, j)));
    }
  }
  if (!out) {
    throw IoError(fmt::format("failed writing matrix to {}", path.string()));
  }
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path, const std::string& magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open {} for reading", path.string()));
  }
  char found[4];
  if (!in.read(found, 4) || std::memcmp(found, magic.data(), 4) != 0) {
    throw ValidationError(fmt::format("{} does not carry the {} magic", path.string(), magic));
  }
  const auto rows = read_u64(in, path.string());
  const auto cols = read_u64(in, path.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = std::bit_cast<double>(read_u64(in, path.string()));
    }
  }
  return m;
}

void save_values(const Eigen::VectorXd& v, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << textio::full_precision(v[i]) << '\n';
  }
}

Eigen::VectorXd load_values(const std::filesystem::path& path) {
  auto in = textio::open_input(path);
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    textio::strip_cr(line);
    ++lineno;
    if (line.empty()) continue;
    values.push_back(
        textio::parse_number<double>(line, fmt::format("{} line {}", path.string(), lineno)));
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

void save_mask(const Mask& mask, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  for (const auto m : mask) out << (m ? '1' : '0') << '\n';
}

Mask load_mask(const std::filesystem::path& path) {
  auto in = textio::open_input(path);
  Mask mask;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    textio::strip_cr(line);
    ++lineno;
    if (line.empty()) continue;
    if (line == "1") {
      mask.push_back(1);
    } else if (line == "0") {
      mask.push_back(0);
    } else {
      throw ValidationError(
          fmt::format("{} line {}: expected 0 or 1, got '{}'", path.string(), lineno, line));
    }
  }
  return mask;
}

}  // namespace spade
