#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "spade/dataset.hpp"

namespace spade {

/// Binary matrix artifact: a 4-byte magic, rows and cols as little-endian
/// u64, then row-major little-endian f64 payload.
void save_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path,
                 const std::string& magic);
Eigen::MatrixXd load_matrix(const std::filesystem::path& path, const std::string& magic);

/// One full-precision decimal per line.
void save_values(const Eigen::VectorXd& v, const std::filesystem::path& path);
Eigen::VectorXd load_values(const std::filesystem::path& path);

/// One 0/1 per line.
void save_mask(const Mask& mask, const std::filesystem::path& path);
Mask load_mask(const std::filesystem::path& path);

inline constexpr const char* kEmbeddingMagic = "EMB1";
inline constexpr const char* kEigenvectorMagic = "VS01";

}  // namespace spade
