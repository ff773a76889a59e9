#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace semeq {

// Shortest decimal form that round-trips to the exact same double; locale
// independent. Infinities render as "inf"/"-inf".
std::string format_double(double value);

std::uint64_t fnv1a_hash(std::string_view text);
std::string hex64(std::uint64_t value);

// Creates parent directories as needed; throws IoError on any failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// Text matrix format: optional leading "# ..." comment lines, a header line
// "rows cols", then one "re im" pair per line in column-major order. Exact
// round-trip thanks to format_double.
void save_complex_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m,
                         const std::string& comment = {});
Eigen::MatrixXcd load_complex_matrix(const std::filesystem::path& path);

}  // namespace semeq
