#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace semeq {

// Pilot set for one link. X is whitened so that X·Xᴴ = n·I; Y is the raw
// receiver-side latent matrix (only the transmitter side is whitened, the
// whitening acting as a right factor of the precoder).
struct SemanticPilots {
    Eigen::MatrixXcd X;  // (d/2) x n, whitened
    Eigen::MatrixXcd Y;  // (m/2) x n
    Eigen::MatrixXcd P;  // (m/2) x (d/2), cross-covariance Y·Xᴴ
    Eigen::MatrixXcd W;  // (d/2) x (d/2), whitening applied to the tx side
    std::vector<int> labels;  // optional class index per pilot column

    int count() const { return static_cast<int>(X.cols()); }
    double target_energy() const { return Y.squaredNorm(); }  // trace(Y·Yᴴ)
};

// Held-out samples for the downstream task proxy. Columns of x_whitened are
// ready to enter the precoder (already paired and whitened with the pilot W).
struct TestSet {
    Eigen::MatrixXcd x_whitened;  // (d/2) x count
    Eigen::MatrixXd target;       // m x count, real receiver-side latents
    std::vector<int> labels;
    Eigen::MatrixXd class_means;  // m x classCount, receiver-space means

    int count() const { return static_cast<int>(x_whitened.cols()); }
};

// Synthetic stand-in for a pair of learned latent spaces: a shared
// Gaussian-mixture latent pushed through two fixed random linear maps.
struct LatentModel {
    int shared_dim = 0;   // dimension of the common latent
    int tx_dim = 0;       // d, real transmitter latent dimension, even
    int rx_dim = 0;       // m, real receiver latent dimension, even
    int class_count = 1;
    double class_separation = 1.0;  // class means live on a sphere of this radius
    double noise_std = 0.1;
    Eigen::MatrixXd mix_tx;       // tx_dim x shared_dim
    Eigen::MatrixXd mix_rx;       // rx_dim x shared_dim
    Eigen::MatrixXd class_means;  // shared_dim x class_count

    // Draws the mix matrices (entries N(0, 1/shared_dim)) and class means
    // (uniform directions scaled to class_separation).
    static LatentModel create(int shared_dim, int tx_dim, int rx_dim, int class_count,
                              double class_separation, double noise_std,
                              std::uint64_t seed);
    void validate() const;
};

struct LatentDraw {
    SemanticPilots pilots;
    TestSet test;
};

// Pairing: component i of the complex vector is s_i + j·s_{i+d/2}. The matrix
// overloads apply the map column by column.
Eigen::VectorXcd pair_real_to_complex(const Eigen::VectorXd& s);
Eigen::VectorXd unpair_complex_to_real(const Eigen::VectorXcd& y);
Eigen::MatrixXcd pair_real_to_complex(const Eigen::MatrixXd& s);
Eigen::MatrixXd unpair_complex_to_real(const Eigen::MatrixXcd& y);

struct WhitenResult {
    Eigen::MatrixXcd x;  // whitened pilots, X·Xᴴ = n·I
    Eigen::MatrixXcd w;  // inverse principal square root of the sample Gram
};

// Whitens so the sample covariance (1/n)·X·Xᴴ becomes the identity. `label`
// names the owning link in the error message when the Gram is rank-deficient
// (condition number above 1e12).
WhitenResult whiten(const Eigen::MatrixXcd& x_raw, const std::string& label = {});

// P = Y·Xᴴ.
Eigen::MatrixXcd cross_covariance(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y);

// Best rank-r factors of P, singular values in non-increasing order.
struct Truncation {
    Eigen::MatrixXcd u;      // (m/2) x r, semi-unitary
    Eigen::VectorXd sigma;   // r, nonnegative descending
    Eigen::MatrixXcd q;      // (d/2) x r, semi-unitary
};
Truncation truncate(const Eigen::MatrixXcd& p, int rank);

// Draws labels, shared latents, and both latent spaces; pairs into complex
// symbols; whitens the tx side. Also returns a held-out test set whose inputs
// are whitened with the SAME pilot-fitted W. `label` names the owning link in
// numerical error messages.
LatentDraw synthesize_latents(const LatentModel& model, int pilot_count, int test_count,
                              std::uint64_t seed, const std::string& label = {});

}  // namespace semeq
