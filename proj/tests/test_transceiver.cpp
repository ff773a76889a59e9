#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "helpers.hpp"
#include "semeq/errors.hpp"
#include "semeq/rng.hpp"
#include "semeq/transceiver.hpp"

using namespace semeq;
using testutil::Instance;
using testutil::random_instance;

namespace {

std::vector<const Eigen::MatrixXcd*> ptrs(const std::vector<Eigen::MatrixXcd>& ms) {
    std::vector<const Eigen::MatrixXcd*> out;
    for (const auto& m : ms) out.push_back(&m);
    return out;
}

}  // namespace

TEST_CASE("MUIN covariance accumulates rival terms plus noise") {
    const double sigma2 = 0.2;
    const Eigen::MatrixXcd none =
        muin_covariance({}, {}, sigma2, 4);
    CHECK((none - sigma2 * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    // One rival with H*F = I.
    std::vector<Eigen::MatrixXcd> h{Eigen::MatrixXcd::Identity(4, 4)};
    std::vector<Eigen::MatrixXcd> f{Eigen::MatrixXcd::Identity(4, 4)};
    const Eigen::MatrixXcd one = muin_covariance(ptrs(h), ptrs(f), sigma2, 4);
    CHECK((one - (1.0 + sigma2) * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-14);

    // Two random rivals against the brute-force sum.
    auto rng = make_engine(5);
    std::vector<Eigen::MatrixXcd> hs{complex_gaussian_matrix(4, 3, rng),
                                     complex_gaussian_matrix(4, 5, rng)};
    std::vector<Eigen::MatrixXcd> fs{complex_gaussian_matrix(3, 2, rng),
                                     complex_gaussian_matrix(5, 2, rng)};
    const Eigen::MatrixXcd rn = muin_covariance(ptrs(hs), ptrs(fs), sigma2, 4);
    Eigen::MatrixXcd brute = sigma2 * Eigen::MatrixXcd::Identity(4, 4);
    for (int j = 0; j < 2; ++j) {
        const Eigen::MatrixXcd a = hs[j] * fs[j];
        brute += a * a.adjoint();
    }
    CHECK((rn - brute).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((rn - rn.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    // Every rival strictly increases the interference energy.
    CHECK(rn.real().trace() >
          muin_covariance({ptrs(hs)[0]}, {ptrs(fs)[0]}, sigma2, 4).real().trace());

    std::vector<Eigen::MatrixXcd> short_f{fs[0]};
    CHECK_THROWS_AS((void)muin_covariance(ptrs(hs), ptrs(short_f), sigma2, 4),
                    std::invalid_argument);
}

TEST_CASE("effective channel covariance") {
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(3, 3);
    const double sigma2 = 0.5;
    CHECK((effective_channel_cov(eye, sigma2 * eye, 1) - (1.0 / sigma2) * eye)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(effective_channel_cov(Eigen::MatrixXcd::Zero(3, 3), sigma2 * eye, 4)
              .cwiseAbs()
              .maxCoeff() == 0.0);

    const Instance inst = random_instance(2);
    const Eigen::MatrixXcd rh = effective_channel_cov(inst.h, inst.rn, inst.n);
    CHECK((rh - rh.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rh);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("descending eigendecomposition") {
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(4, 4);
    const EigDescending id = eig_descending(eye);
    CHECK((id.lambda.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((id.v * id.v.adjoint() - eye).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(2, 2);
    diag(0, 0) = 1.0;
    diag(1, 1) = 4.0;
    const EigDescending d = eig_descending(diag);
    CHECK(d.lambda(0) == doctest::Approx(4.0));
    CHECK(d.lambda(1) == doctest::Approx(1.0));

    auto rng = make_engine(9);
    const Eigen::MatrixXcd b = complex_gaussian_matrix(5, 5, rng);
    const Eigen::MatrixXcd psd = b * b.adjoint();
    const EigDescending e = eig_descending(psd);
    CHECK((e.v * e.lambda.asDiagonal() * e.v.adjoint() - psd).cwiseAbs().maxCoeff() < 1e-9);
    for (int i = 1; i < 5; ++i) CHECK(e.lambda(i) <= e.lambda(i - 1) + 1e-15);
    CHECK(e.lambda.minCoeff() >= 0.0);

    CHECK_THROWS_AS((void)eig_descending(b), std::invalid_argument);  // not Hermitian
}

TEST_CASE("precoder assembly uses the square-root power convention") {
    const Eigen::MatrixXcd eye1 = Eigen::MatrixXcd::Identity(1, 1);
    Eigen::VectorXd phi(1);
    phi << 4.0;
    CHECK(std::abs(assemble_precoder(eye1, phi, eye1)(0, 0) - 2.0) < 1e-15);

    auto rng = make_engine(13);
    const Eigen::MatrixXcd psd =
        complex_gaussian_matrix(4, 4, rng) * complex_gaussian_matrix(4, 4, rng).adjoint();
    const Eigen::MatrixXcd v = eig_descending((psd + psd.adjoint()) / 2.0).v;
    const Eigen::MatrixXcd q = truncate(complex_gaussian_matrix(6, 4, rng), 4).q;
    Eigen::VectorXd powers(4);
    powers << 1.5, 0.25, 0.0, 3.0;
    const Eigen::MatrixXcd f = assemble_precoder(v, powers, q);
    CHECK(f.squaredNorm() == doctest::Approx(powers.sum()).epsilon(1e-10));
    CHECK(assemble_precoder(v, Eigen::VectorXd::Zero(4), q).cwiseAbs().maxCoeff() == 0.0);

    Eigen::VectorXd negative(4);
    negative << 1.0, -0.1, 0.0, 0.0;
    CHECK_THROWS_AS((void)assemble_precoder(v, negative, q), std::invalid_argument);
}

TEST_CASE("Wiener equalizer: scalar closed form and zero channel") {
    // A = 1, P = p, Rn = sigma2, n = 1: G = p/(1 + sigma2).
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(1, 1);
    Eigen::MatrixXcd p(1, 1);
    p(0, 0) = std::complex<double>(0.7, -0.3);
    const double sigma2 = 0.6;
    const Eigen::MatrixXcd g = wiener_equalizer(p, one, one, sigma2 * one, 1);
    CHECK(std::abs(g(0, 0) - p(0, 0) / (1.0 + sigma2)) < 1e-14);

    const Instance inst = random_instance(3);
    const Eigen::MatrixXcd zero_f = Eigen::MatrixXcd::Zero(inst.f.rows(), inst.f.cols());
    CHECK(wiener_equalizer(inst.p, inst.h, zero_f, inst.rn, inst.n).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("Wiener equalizer minimizes the direct objective") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 5; ++trial) {
        const Instance inst = random_instance(100 + trial);
        const Eigen::MatrixXcd g = wiener_equalizer(inst.p, inst.h, inst.f, inst.rn, inst.n);
        const double base =
            direct_objective(inst.f, g, inst.h, inst.rn, inst.x, inst.y, inst.n);
        const double scale = g.norm();
        for (int k = 0; k < 1000; ++k) {
            Eigen::MatrixXcd delta(g.rows(), g.cols());
            for (int i = 0; i < delta.size(); ++i)
                delta.data()[i] = std::complex<double>(normal(rng), normal(rng));
            delta *= 1e-3 * scale / delta.norm();
            const double perturbed = direct_objective(inst.f, g + delta, inst.h, inst.rn,
                                                      inst.x, inst.y, inst.n);
            CHECK(perturbed >= base - 1e-12);
        }
    }
}

TEST_CASE("direct objective matches its definition and Monte Carlo") {
    const Instance inst = random_instance(7, 3, 2, 2, 3, 8);
    const Eigen::MatrixXcd zero_g = Eigen::MatrixXcd::Zero(3, 3);
    CHECK(direct_objective(inst.f, zero_g, inst.h, inst.rn, inst.x, inst.y, inst.n) ==
          doctest::Approx(inst.y.squaredNorm() / inst.n).epsilon(1e-12));

    // Perfect scalar link with no noise-term contribution.
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(1, 1);
    Eigen::MatrixXcd x(1, 1);
    x(0, 0) = 1.0;
    CHECK(direct_objective(one, one, one, Eigen::MatrixXcd::Zero(1, 1), x, x, 1) ==
          doctest::Approx(0.0));

    // Monte Carlo: average pilot error over sampled MUIN realizations.
    const Eigen::MatrixXcd g = wiener_equalizer(inst.p, inst.h, inst.f, inst.rn, inst.n);
    const double expected =
        direct_objective(inst.f, g, inst.h, inst.rn, inst.x, inst.y, inst.n);
    const Eigen::MatrixXcd l = Eigen::LLT<Eigen::MatrixXcd>(inst.rn).matrixL();
    const Eigen::MatrixXcd clean = inst.y - g * inst.h * inst.f * inst.x;
    auto noise_rng = make_engine(555);
    double acc = 0;
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) {
        const Eigen::MatrixXcd noise = l * complex_gaussian_matrix(3, inst.n, noise_rng);
        acc += (clean - g * noise).squaredNorm() / inst.n;
    }
    CHECK(acc / draws == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("analytic MSE equals the direct objective at the Wiener point") {
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(200 + trial);
        const Eigen::MatrixXcd g = wiener_equalizer(inst.p, inst.h, inst.f, inst.rn, inst.n);
        const double direct =
            direct_objective(inst.f, g, inst.h, inst.rn, inst.x, inst.y, inst.n);
        const double analytic = analytic_mse(inst.f, inst.h, inst.rn, inst.p, inst.sy, inst.n);
        CHECK(analytic == doctest::Approx(direct).epsilon(1e-8));
    }

    const Instance inst = random_instance(99);
    const Eigen::MatrixXcd zero_f = Eigen::MatrixXcd::Zero(inst.f.rows(), inst.f.cols());
    CHECK(analytic_mse(zero_f, inst.h, inst.rn, inst.p, inst.sy, inst.n) ==
          doctest::Approx(inst.sy / inst.n).epsilon(1e-12));
}

TEST_CASE("diagonal payoff: limits and the hand-solved case") {
    Eigen::VectorXd lambda(2), weight(2), phi(2);
    lambda << 2.0, 0.5;
    weight << 1.0, 1.0;
    phi << 2.0 / 3.0, 1.0 / 3.0;
    CHECK(diagonal_payoff(phi, lambda, weight, 1) ==
          doctest::Approx(5.0 / 7.0).epsilon(1e-12));
    CHECK(approx_diagonal_mse(phi, lambda, weight, 1, 10.0) ==
          doctest::Approx(10.0 - 5.0 / 7.0).epsilon(1e-12));

    CHECK(diagonal_payoff(Eigen::VectorXd::Zero(2), lambda, weight, 1) == 0.0);

    // Saturation: phi*lambda -> inf pushes the payoff to (1/n)*sum(weights).
    Eigen::VectorXd huge = Eigen::VectorXd::Constant(2, 1e12);
    CHECK(diagonal_payoff(huge, lambda, weight, 1) ==
          doctest::Approx(2.0).epsilon(1e-10));

    Eigen::VectorXd short_vec(1);
    short_vec << 1.0;
    CHECK_THROWS_AS((void)diagonal_payoff(short_vec, lambda, weight, 1),
                    std::invalid_argument);
    Eigen::VectorXd negative(2);
    negative << -1.0, 1.0;
    CHECK_THROWS_AS((void)diagonal_payoff(negative, lambda, weight, 1),
                    std::invalid_argument);
}

TEST_CASE("diagonal MSE is exact for assembled precoders") {
    // Build a single-link problem the way the game does: lambda from the
    // whitened effective channel, weights from the singular values of P.
    for (const int rank_drop : {0, 2}) {
        const int d_half = 6;
        const int m_half = 8;
        const int n = 32;
        auto rng = make_engine(404 + rank_drop);
        const Eigen::MatrixXcd h = complex_gaussian_matrix(7, 6, rng);
        const Eigen::MatrixXcd b = complex_gaussian_matrix(7, 7, rng);
        const Eigen::MatrixXcd rn =
            (b * b.adjoint()) / 7.0 + 0.4 * Eigen::MatrixXcd::Identity(7, 7);
        const Eigen::MatrixXcd x = whiten(complex_gaussian_matrix(d_half, n, rng)).x;
        const Eigen::MatrixXcd y = complex_gaussian_matrix(m_half, n, rng);
        const Eigen::MatrixXcd p = cross_covariance(x, y);

        const int rank = d_half - rank_drop;  // rank_drop > 0 exercises compression
        const EigDescending eig = eig_descending(effective_channel_cov(h, rn, n));
        const Truncation trunc = truncate(p, rank);
        const Eigen::VectorXd lambda = double(n) * eig.lambda.head(rank);
        const Eigen::VectorXd weight =
            trunc.sigma.array().square().matrix() / double(n);

        auto phi_rng = make_engine(505);
        Eigen::VectorXd phi(rank);
        for (int i = 0; i < rank; ++i)
            phi(i) = std::abs(complex_gaussian(phi_rng));
        // At full rank this is assemble_precoder; the compressed variant keeps
        // only the leading eigencolumns, as the game does when K*N_T < d/2.
        const Eigen::MatrixXcd f = eig.v.leftCols(rank) *
                                   phi.cwiseSqrt().asDiagonal() * trunc.q.adjoint();

        const double analytic = analytic_mse(f, h, rn, p, y.squaredNorm(), n);
        const double diagonal =
            approx_diagonal_mse(phi, lambda, weight, n, y.squaredNorm());
        CHECK(diagonal == doctest::Approx(analytic).epsilon(1e-8));
    }
}
