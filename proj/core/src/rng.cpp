#include "semeq/rng.hpp"

namespace semeq {

namespace {

// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    return splitmix64(seed ^ splitmix64(fnv1a(tag)));
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
    return splitmix64(mix_seed(seed, tag) ^ splitmix64(index + 1));
}

std::complex<double> complex_gaussian(std::mt19937_64& rng) {
    static constexpr double kHalf = 0.5;
    std::normal_distribution<double> n01(0.0, 1.0);
    const double re = n01(rng);
    const double im = n01(rng);
    return {re * std::sqrt(kHalf), im * std::sqrt(kHalf)};
}

Eigen::MatrixXcd complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                         std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const double scale = std::sqrt(0.5);
    Eigen::MatrixXcd out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            out(i, j) = std::complex<double>(n01(rng) * scale, n01(rng) * scale);
    return out;
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            out(i, j) = n01(rng);
    return out;
}

}  // namespace semeq
