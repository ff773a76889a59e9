#include "semeq/transceiver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "semeq/errors.hpp"

namespace semeq {

Eigen::MatrixXcd muin_covariance(const std::vector<const Eigen::MatrixXcd*>& cross_channels,
                                 const std::vector<const Eigen::MatrixXcd*>& rival_precoders,
                                 double sigma2, int rx_dim) {
    if (cross_channels.size() != rival_precoders.size())
        throw std::invalid_argument("muin_covariance: " +
                                    std::to_string(cross_channels.size()) + " channels vs " +
                                    std::to_string(rival_precoders.size()) + " precoders");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("muin_covariance: sigma2 must be > 0");
    Eigen::MatrixXcd rn =
        sigma2 * Eigen::MatrixXcd::Identity(rx_dim, rx_dim);
    for (std::size_t j = 0; j < cross_channels.size(); ++j) {
        const Eigen::MatrixXcd& h = *cross_channels[j];
        const Eigen::MatrixXcd& f = *rival_precoders[j];
        if (h.rows() != rx_dim || h.cols() != f.rows())
            throw std::invalid_argument("muin_covariance: rival " + std::to_string(j) +
                                        " shape mismatch");
        const Eigen::MatrixXcd hf = h * f;
        rn.noalias() += hf * hf.adjoint();
    }
    return rn;
}

Eigen::MatrixXcd effective_channel_cov(const Eigen::MatrixXcd& h_direct,
                                       const Eigen::MatrixXcd& r_muin, int pilot_count) {
    if (r_muin.rows() != r_muin.cols() || r_muin.rows() != h_direct.rows())
        throw std::invalid_argument("effective_channel_cov: shape mismatch");
    Eigen::LLT<Eigen::MatrixXcd> llt(r_muin);
    if (llt.info() != Eigen::Success)
        throw NumericalError("effective_channel_cov: MUIN covariance is not positive "
                             "definite");
    Eigen::MatrixXcd rh = h_direct.adjoint() * llt.solve(h_direct) /
                          static_cast<double>(pilot_count);
    return 0.5 * (rh + rh.adjoint().eval());
}

EigDescending eig_descending(const Eigen::MatrixXcd& hermitian) {
    if (hermitian.rows() != hermitian.cols())
        throw std::invalid_argument("eig_descending: matrix not square");
    const double scale = std::max(1.0, hermitian.cwiseAbs().maxCoeff());
    if ((hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::invalid_argument("eig_descending: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
        0.5 * (hermitian + hermitian.adjoint()));
    if (eig.info() != Eigen::Success)
        throw NumericalError("eig_descending: eigendecomposition failed");
    const Eigen::Index n = hermitian.rows();
    EigDescending out;
    out.v.resize(n, n);
    out.lambda.resize(n);
    // Eigen sorts ascending; flip to descending and clamp round-off negatives.
    for (Eigen::Index i = 0; i < n; ++i) {
        out.lambda(i) = std::max(0.0, eig.eigenvalues()(n - 1 - i));
        out.v.col(i) = eig.eigenvectors().col(n - 1 - i);
    }
    return out;
}

Eigen::MatrixXcd assemble_precoder(const Eigen::MatrixXcd& v, const Eigen::VectorXd& phi,
                                   const Eigen::MatrixXcd& q) {
    if (v.rows() != v.cols() || v.cols() != phi.size() || q.cols() != phi.size())
        throw std::invalid_argument("assemble_precoder: shape mismatch");
    if ((phi.array() < 0.0).any())
        throw std::invalid_argument("assemble_precoder: negative mode power");
    return v * phi.cwiseSqrt().asDiagonal() * q.adjoint();
}

Eigen::MatrixXcd wiener_equalizer(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& h_direct,
                                  const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& r_muin,
                                  int pilot_count) {
    const Eigen::MatrixXcd a = h_direct * f;
    if (p.cols() != a.cols())
        throw std::invalid_argument("wiener_equalizer: P and H·F disagree on the latent "
                                    "dimension");
    Eigen::MatrixXcd s = a * a.adjoint() + r_muin;
    Eigen::LLT<Eigen::MatrixXcd> llt(s);
    if (llt.info() != Eigen::Success)
        throw NumericalError("wiener_equalizer: system matrix not positive definite");
    // G = (1/n)·P·Aᴴ·S⁻¹, computed as the adjoint of S⁻¹·(A·Pᴴ).
    return llt.solve(a * p.adjoint()).adjoint() / static_cast<double>(pilot_count);
}

double direct_objective(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& g,
                        const Eigen::MatrixXcd& h_direct, const Eigen::MatrixXcd& r_muin,
                        const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y,
                        int pilot_count) {
    if (x.cols() != y.cols())
        throw std::invalid_argument("direct_objective: pilot counts differ");
    const double n = static_cast<double>(pilot_count);
    const double fit = (y - g * (h_direct * (f * x))).squaredNorm() / n;
    const double noise = (g * r_muin * g.adjoint()).real().trace();
    return fit + noise;
}

double analytic_mse(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& h_direct,
                    const Eigen::MatrixXcd& r_muin, const Eigen::MatrixXcd& p, double sy,
                    int pilot_count) {
    const double n = static_cast<double>(pilot_count);
    const Eigen::MatrixXcd a = h_direct * f;
    Eigen::MatrixXcd s = a * a.adjoint() + r_muin;
    Eigen::LLT<Eigen::MatrixXcd> llt(s);
    if (llt.info() != Eigen::Success)
        throw NumericalError("analytic_mse: system matrix not positive definite");
    const Eigen::MatrixXcd t = p * a.adjoint();
    // trace(T·S⁻¹·Tᴴ) is real for Hermitian positive definite S.
    const double captured = (t * llt.solve(t.adjoint())).real().trace();
    return sy / n - captured / (n * n);
}

double diagonal_payoff(const Eigen::VectorXd& phi, const Eigen::VectorXd& lambda,
                       const Eigen::VectorXd& sigma_tilde2, int pilot_count) {
    if (phi.size() != lambda.size() || phi.size() != sigma_tilde2.size())
        throw std::invalid_argument("diagonal_payoff: vector lengths differ");
    if ((phi.array() < 0.0).any() || (lambda.array() < 0.0).any() ||
        (sigma_tilde2.array() < 0.0).any())
        throw std::invalid_argument("diagonal_payoff: negative inputs");
    double sum = 0.0;
    for (Eigen::Index m = 0; m < phi.size(); ++m) {
        const double pl = phi(m) * lambda(m);
        sum += sigma_tilde2(m) * pl / (pl + 1.0);
    }
    return sum / static_cast<double>(pilot_count);
}

double approx_diagonal_mse(const Eigen::VectorXd& phi, const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& sigma_tilde2, int pilot_count, double sy) {
    return sy / static_cast<double>(pilot_count) -
           diagonal_payoff(phi, lambda, sigma_tilde2, pilot_count);
}

}  // namespace semeq
