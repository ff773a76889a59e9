#pragma once

#include <Eigen/Dense>
#include <vector>

#include "semeq/semantics.hpp"

namespace semeq {

// Everything one link carries between game iterations: the live precoder and
// equalizer plus the decompositions they were built from.
struct TransceiverState {
    Eigen::MatrixXcd F;   // (K·N_T) x (d/2)
    Eigen::MatrixXcd G;   // (m/2) x (K·N_R)
    Eigen::VectorXd phi;  // per-mode powers, length K·N_T
    Eigen::MatrixXcd Rn;  // MUIN covariance the design was computed against
    Eigen::MatrixXcd V;   // assembly eigenbasis of F (pinned during a game run)
    Eigen::VectorXd mode_gain;    // lambda, diagonal-domain channel gains
    Eigen::VectorXd mode_weight;  // sigma-tilde squared, diagonal-domain weights
};

// Rn = sum over rivals of (H_{j,l} F_j)(H_{j,l} F_j)ᴴ + sigma2·I. The spans
// pair cross channels with the matching rival precoders; rx_dim sizes the
// identity when the rival list is empty.
Eigen::MatrixXcd muin_covariance(const std::vector<const Eigen::MatrixXcd*>& cross_channels,
                                 const std::vector<const Eigen::MatrixXcd*>& rival_precoders,
                                 double sigma2, int rx_dim);

// R_H = (1/n)·Hᴴ·Rn⁻¹·H, Hermitian PSD.
Eigen::MatrixXcd effective_channel_cov(const Eigen::MatrixXcd& h_direct,
                                       const Eigen::MatrixXcd& r_muin, int pilot_count);

struct EigDescending {
    Eigen::MatrixXcd v;       // unitary, columns ordered to match lambda
    Eigen::VectorXd lambda;   // non-increasing, negative round-off clamped to 0
};
EigDescending eig_descending(const Eigen::MatrixXcd& hermitian);

// F = V·diag(sqrt(phi))·Q̃ᴴ. phi holds per-mode POWERS, so trace(F·Fᴴ) equals
// the plain sum of phi.
Eigen::MatrixXcd assemble_precoder(const Eigen::MatrixXcd& v, const Eigen::VectorXd& phi,
                                   const Eigen::MatrixXcd& q);

// Exact minimizer of the pilot objective over G for fixed F. With A = H·F and
// general pilots this is P·Aᴴ·(A·(X·Xᴴ)·Aᴴ + n·Rn)⁻¹; under the whitening
// convention X·Xᴴ = n·I it collapses to (1/n)·P·Aᴴ·(A·Aᴴ + Rn)⁻¹, which is
// what we compute. A variant sometimes written for this filter uses
// (A·Aᴴ + n·Rn)⁻¹ instead; that one is NOT the minimizer under this pilot
// normalization, and the perturbation tests pin the difference.
Eigen::MatrixXcd wiener_equalizer(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& h_direct,
                                  const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& r_muin,
                                  int pilot_count);

// The pilot objective itself: (1/n)·‖Y − G·H·F·X‖_F² + trace(G·Rn·Gᴴ). The
// trace term is the exact expectation of the MUIN contribution per sample.
double direct_objective(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& g,
                        const Eigen::MatrixXcd& h_direct, const Eigen::MatrixXcd& r_muin,
                        const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y,
                        int pilot_count);

// Closed form of the objective at the Wiener solution:
//   Sy/n − (1/n²)·trace(P·Aᴴ·(A·Aᴴ + Rn)⁻¹·A·Pᴴ),  A = H·F.
// Agrees with direct_objective(f, wiener_equalizer(...)) to rounding.
double analytic_mse(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& h_direct,
                    const Eigen::MatrixXcd& r_muin, const Eigen::MatrixXcd& p, double sy,
                    int pilot_count);

// Diagonal-domain payoff (1/n)·Σ σ̃²·φλ/(φλ + 1) and the matching MSE
// Sy/n − payoff. These are EXACT equalities, not approximations, whenever F
// is assembled from V and Q̃ and the diagonal quantities follow the
// convention used throughout: mode gains λ are the eigenvalues of
// Hᴴ·Rn⁻¹·H (that is, n times the effective channel covariance spectrum) and
// mode weights σ̃² are the squared singular values of P divided by n.
double diagonal_payoff(const Eigen::VectorXd& phi, const Eigen::VectorXd& lambda,
                       const Eigen::VectorXd& sigma_tilde2, int pilot_count);
double approx_diagonal_mse(const Eigen::VectorXd& phi, const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& sigma_tilde2, int pilot_count, double sy);

}  // namespace semeq
