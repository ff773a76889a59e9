#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string_view>

namespace semeq {

// Every random quantity in a run is drawn from its own engine, seeded by
// mixing the run seed with a purpose tag (and optionally an index). Changing
// the number of draws in one place then never shifts the stream of another,
// which is what keeps runs reproducible across code motion and worker counts.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index);

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

// Circularly-symmetric complex Gaussian CN(0,1): Re and Im each N(0, 1/2).
std::complex<double> complex_gaussian(std::mt19937_64& rng);

// Matrix with i.i.d. CN(0,1) entries, filled column-major.
Eigen::MatrixXcd complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                         std::mt19937_64& rng);

// Matrix with i.i.d. N(0,1) entries, filled column-major.
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

}  // namespace semeq
