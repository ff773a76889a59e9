#include "semeq/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "semeq/errors.hpp"
#include "semeq/rng.hpp"

namespace semeq {

Eigen::VectorXcd pair_real_to_complex(const Eigen::VectorXd& s) {
    if (s.size() % 2 != 0)
        throw std::invalid_argument("pair_real_to_complex: odd length " +
                                    std::to_string(s.size()));
    const Eigen::Index half = s.size() / 2;
    Eigen::VectorXcd out(half);
    out.real() = s.head(half);
    out.imag() = s.tail(half);
    return out;
}

Eigen::VectorXd unpair_complex_to_real(const Eigen::VectorXcd& y) {
    Eigen::VectorXd out(2 * y.size());
    out.head(y.size()) = y.real();
    out.tail(y.size()) = y.imag();
    return out;
}

Eigen::MatrixXcd pair_real_to_complex(const Eigen::MatrixXd& s) {
    if (s.rows() % 2 != 0)
        throw std::invalid_argument("pair_real_to_complex: odd row count " +
                                    std::to_string(s.rows()));
    const Eigen::Index half = s.rows() / 2;
    Eigen::MatrixXcd out(half, s.cols());
    out.real() = s.topRows(half);
    out.imag() = s.bottomRows(half);
    return out;
}

Eigen::MatrixXd unpair_complex_to_real(const Eigen::MatrixXcd& y) {
    Eigen::MatrixXd out(2 * y.rows(), y.cols());
    out.topRows(y.rows()) = y.real();
    out.bottomRows(y.rows()) = y.imag();
    return out;
}

WhitenResult whiten(const Eigen::MatrixXcd& x_raw, const std::string& label) {
    const std::string who = label.empty() ? std::string("pilots") : label;
    if (x_raw.cols() < x_raw.rows())
        throw NumericalError(who + ": " + std::to_string(x_raw.cols()) +
                             " pilots cannot whiten dimension " +
                             std::to_string(x_raw.rows()));
    const double n = static_cast<double>(x_raw.cols());
    Eigen::MatrixXcd gram = (x_raw * x_raw.adjoint()) / n;
    gram = 0.5 * (gram + gram.adjoint().eval());  // absorb round-off skew
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    if (eig.info() != Eigen::Success)
        throw NumericalError(who + ": eigendecomposition of the pilot Gram failed");
    const Eigen::VectorXd& ev = eig.eigenvalues();  // ascending
    const double lo = ev(0);
    const double hi = ev(ev.size() - 1);
    if (!(lo > 0.0) || hi / lo >= 1e12)
        throw NumericalError(who + ": pilot Gram is rank-deficient (condition " +
                             std::to_string(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()) +
                             "), cannot whiten");
    // Inverse principal square root; Hermitian, so it commutes with the Gram.
    Eigen::MatrixXcd w = eig.eigenvectors() *
                         ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                         eig.eigenvectors().adjoint();
    return {w * x_raw, std::move(w)};
}

Eigen::MatrixXcd cross_covariance(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    if (x.cols() != y.cols())
        throw std::invalid_argument("cross_covariance: pilot counts differ (" +
                                    std::to_string(x.cols()) + " vs " +
                                    std::to_string(y.cols()) + ")");
    return y * x.adjoint();
}

Truncation truncate(const Eigen::MatrixXcd& p, int rank) {
    const int cap = static_cast<int>(std::min(p.rows(), p.cols()));
    if (rank < 1 || rank > cap)
        throw std::invalid_argument("truncate: rank " + std::to_string(rank) +
                                    " outside [1, " + std::to_string(cap) + "]");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Truncation t;
    t.u = svd.matrixU().leftCols(rank);
    t.sigma = svd.singularValues().head(rank);
    t.q = svd.matrixV().leftCols(rank);
    return t;
}

LatentModel LatentModel::create(int shared_dim, int tx_dim, int rx_dim, int class_count,
                                double class_separation, double noise_std,
                                std::uint64_t seed) {
    LatentModel model;
    model.shared_dim = shared_dim;
    model.tx_dim = tx_dim;
    model.rx_dim = rx_dim;
    model.class_count = class_count;
    model.class_separation = class_separation;
    model.noise_std = noise_std;
    auto rng = make_engine(mix_seed(seed, "latent-model"));
    const double scale = 1.0 / std::sqrt(static_cast<double>(shared_dim));
    model.mix_tx = gaussian_matrix(tx_dim, shared_dim, rng) * scale;
    model.mix_rx = gaussian_matrix(rx_dim, shared_dim, rng) * scale;
    model.class_means.resize(shared_dim, class_count);
    for (int c = 0; c < class_count; ++c) {
        Eigen::VectorXd dir = gaussian_matrix(shared_dim, 1, rng);
        const double norm = dir.norm();
        model.class_means.col(c) =
            norm > 0.0 ? Eigen::VectorXd(dir * (class_separation / norm))
                       : Eigen::VectorXd::Zero(shared_dim);
    }
    model.validate();
    return model;
}

void LatentModel::validate() const {
    if (shared_dim < 1) throw ConfigError("latent.sharedDim: must be >= 1");
    if (tx_dim < 2 || tx_dim % 2 != 0)
        throw ConfigError("latent: txDim must be even and >= 2, got " +
                          std::to_string(tx_dim));
    if (rx_dim < 2 || rx_dim % 2 != 0)
        throw ConfigError("latent: rxDim must be even and >= 2, got " +
                          std::to_string(rx_dim));
    if (class_count < 1) throw ConfigError("latent.classCount: must be >= 1");
    if (class_separation < 0.0) throw ConfigError("latent.classSeparation: must be >= 0");
    if (noise_std < 0.0) throw ConfigError("latent.noiseStd: must be >= 0");
    if (mix_tx.rows() != tx_dim || mix_tx.cols() != shared_dim)
        throw ConfigError("latent: tx mix matrix shape mismatch");
    if (mix_rx.rows() != rx_dim || mix_rx.cols() != shared_dim)
        throw ConfigError("latent: rx mix matrix shape mismatch");
    if (class_means.rows() != shared_dim || class_means.cols() != class_count)
        throw ConfigError("latent: class means shape mismatch");
}

namespace {

struct MixtureDraw {
    Eigen::MatrixXd tx;  // tx_dim x count
    Eigen::MatrixXd rx;  // rx_dim x count
    std::vector<int> labels;
};

MixtureDraw draw_mixture(const LatentModel& model, int count, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick_class(0, model.class_count - 1);
    std::normal_distribution<double> n01(0.0, 1.0);
    MixtureDraw out;
    out.tx.resize(model.tx_dim, count);
    out.rx.resize(model.rx_dim, count);
    out.labels.resize(count);
    Eigen::VectorXd z(model.shared_dim);
    for (int i = 0; i < count; ++i) {
        const int label = pick_class(rng);
        out.labels[i] = label;
        for (int k = 0; k < model.shared_dim; ++k)
            z(k) = model.class_means(k, label) + model.noise_std * n01(rng);
        out.tx.col(i) = model.mix_tx * z;
        out.rx.col(i) = model.mix_rx * z;
        for (int k = 0; k < model.tx_dim; ++k) out.tx(k, i) += model.noise_std * n01(rng);
        for (int k = 0; k < model.rx_dim; ++k) out.rx(k, i) += model.noise_std * n01(rng);
    }
    return out;
}

}  // namespace

LatentDraw synthesize_latents(const LatentModel& model, int pilot_count, int test_count,
                              std::uint64_t seed, const std::string& label) {
    model.validate();
    if (pilot_count < std::max(model.tx_dim, model.rx_dim))
        throw ConfigError("latent.pilotCount: " + std::to_string(pilot_count) +
                          " pilots for latent dimensions " + std::to_string(model.tx_dim) +
                          "/" + std::to_string(model.rx_dim) +
                          "; need at least max(d, m)");
    if (test_count < 0) throw ConfigError("latent.testCount: must be >= 0");

    LatentDraw out;
    {
        auto rng = make_engine(mix_seed(seed, "pilots"));
        MixtureDraw draw = draw_mixture(model, pilot_count, rng);
        WhitenResult white = whiten(pair_real_to_complex(draw.tx), label);
        out.pilots.X = std::move(white.x);
        out.pilots.W = std::move(white.w);
        out.pilots.Y = pair_real_to_complex(draw.rx);
        out.pilots.P = cross_covariance(out.pilots.X, out.pilots.Y);
        out.pilots.labels = std::move(draw.labels);
    }
    {
        auto rng = make_engine(mix_seed(seed, "heldout"));
        MixtureDraw draw = draw_mixture(model, test_count, rng);
        out.test.x_whitened = out.pilots.W * pair_real_to_complex(draw.tx);
        out.test.target = std::move(draw.rx);
        out.test.labels = std::move(draw.labels);
        out.test.class_means = model.mix_rx * model.class_means;
    }
    return out;
}

}  // namespace semeq
