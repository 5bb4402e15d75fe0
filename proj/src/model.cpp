#include "envctrl/model.hpp"

#include <cmath>
#include <string>

namespace envctrl {

namespace {

const Eigen::Matrix4cd& bell_vectors() {
    static const Eigen::Matrix4cd v = [] {
        const double r = 1.0 / std::sqrt(2.0);
        Eigen::Matrix4cd m;
        // clang-format off
        m << r,  r, 0,  0,
             0,  0, r,  r,
             0,  0, r, -r,
             r, -r, 0,  0;
        // clang-format on
        return m;
    }();
    return v;
}

double ratio_squared(const BathMode& m) {
    const double r = m.g / m.omega;
    return r * r;
}

} // namespace

BathSpec::BathSpec(std::vector<BathMode> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw std::invalid_argument("bath must contain at least one mode");
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const auto& m = modes_[i];
        const std::string where = "bath mode " + std::to_string(i) + ": ";
        if (!std::isfinite(m.omega) || m.omega <= 0.0) throw std::invalid_argument(where + "omega must be finite and > 0");
        if (!std::isfinite(m.g)) throw std::invalid_argument(where + "g must be finite");
        if (!std::isfinite(m.nbar) || m.nbar < 0.0) throw std::invalid_argument(where + "nbar must be finite and >= 0");
    }
}

InteractionSpec::InteractionSpec(const Alphas& alphas, Eigenbasis basis, const Eigen::Matrix4cd& vectors)
    : alphas_(alphas), basis_(basis), vectors_(vectors) {
    for (double a : alphas_) {
        if (!std::isfinite(a)) throw std::invalid_argument("interaction alphas must be finite");
    }
}

InteractionSpec InteractionSpec::factorized(const Alphas& alphas) {
    return InteractionSpec(alphas, Eigenbasis::Factorized, Eigen::Matrix4cd::Identity());
}

InteractionSpec InteractionSpec::bell(const Alphas& alphas) {
    return InteractionSpec(alphas, Eigenbasis::Bell, bell_vectors());
}

InteractionSpec InteractionSpec::general(const Alphas& alphas, const Eigen::Matrix4cd& eigenvectors) {
    const double err = (eigenvectors.adjoint() * eigenvectors - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
    if (!(err <= 1e-12)) {
        throw std::invalid_argument("interaction eigenvectors are not unitary (|U^dag U - I| = " + std::to_string(err) + ")");
    }
    return InteractionSpec(alphas, Eigenbasis::General, eigenvectors);
}

Eigen::Matrix4cd InteractionSpec::operator_matrix() const {
    Eigen::Vector4cd d;
    for (int i = 0; i < 4; ++i) d(i) = alphas_[i];
    return vectors_ * d.asDiagonal() * vectors_.adjoint();
}

QubitState::QubitState(const Eigen::Vector3d& bloch) : bloch_(bloch) {
    if (!bloch_.allFinite()) throw std::invalid_argument("Bloch vector must be finite");
    if (bloch_.norm() > 1.0 + kNormTolerance) {
        throw std::invalid_argument("Bloch vector norm " + std::to_string(bloch_.norm()) + " exceeds 1");
    }
}

DensityMatrix2::DensityMatrix2() : rho_(Eigen::Matrix2cd::Identity() / 2.0) {}

DensityMatrix2::DensityMatrix2(const Eigen::Matrix2cd& rho) : rho_(rho) {
    if (!rho_.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
    if (hermiticity_error(rho_) > kTolerance) throw std::invalid_argument("density matrix is not Hermitian");
    if (trace_error(rho_) > kTolerance) throw std::invalid_argument("density matrix trace differs from 1");
    if (min_eigenvalue() < -kTolerance) throw std::invalid_argument("density matrix is not positive semidefinite");
}

DensityMatrix2 DensityMatrix2::from_bloch(const QubitState& s) {
    Eigen::Matrix2cd rho;
    rho << Complex(1.0 + s.z(), 0.0), Complex(s.x(), -s.y()),
           Complex(s.x(), s.y()), Complex(1.0 - s.z(), 0.0);
    rho /= 2.0;
    return DensityMatrix2(rho);
}

QubitState DensityMatrix2::bloch() const {
    Eigen::Vector3d s(2.0 * rho_(0, 1).real(), -2.0 * rho_(0, 1).imag(), (rho_(0, 0) - rho_(1, 1)).real());
    // Clip rounding-level excursions past the unit sphere.
    const double n = s.norm();
    if (n > 1.0 && n <= 1.0 + 1e-9) s /= n;
    return QubitState(s);
}

double DensityMatrix2::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix2::min_eigenvalue() const {
    const Eigen::Matrix2cd h = (rho_ + rho_.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double hermiticity_error(const Eigen::MatrixXcd& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double trace_error(const Eigen::MatrixXcd& m) { return std::abs(m.trace() - Complex(1.0, 0.0)); }

Eigen::Matrix2cd partial_trace_probe(const Eigen::Matrix4cd& m) {
    Eigen::Matrix2cd out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out(a, b) = m(2 * a, 2 * b) + m(2 * a + 1, 2 * b + 1);
    return out;
}

double bose_occupation(double omega, double temperature) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("bose_occupation: omega must be > 0");
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw std::invalid_argument("bose_occupation: temperature must be finite and >= 0");
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

double dephasing_f(const BathSpec& bath, double t) {
    double acc = 0.0;
    for (const auto& m : bath.modes()) {
        // 1 - cos x = 2 sin^2(x/2) keeps precision at small x.
        const double h = std::sin(0.5 * m.omega * t);
        acc += ratio_squared(m) * (1.0 + 2.0 * m.nbar) * 2.0 * h * h;
    }
    return acc;
}

double phase_phi(const BathSpec& bath, double t) {
    double acc = 0.0;
    for (const auto& m : bath.modes()) {
        const double x = m.omega * t;
        acc += ratio_squared(m) * (x - std::sin(x));
    }
    return acc;
}

Complex gamma_from(double f, double phi, double alpha_i, double alpha_j) {
    const double d = alpha_i - alpha_j;
    const double magnitude = std::exp(-d * d * f);
    const double angle = (alpha_i * alpha_i - alpha_j * alpha_j) * phi;
    return {magnitude * std::cos(angle), magnitude * std::sin(angle)};
}

Complex gamma(const BathSpec& bath, double alpha_i, double alpha_j, double t) {
    return gamma_from(dephasing_f(bath, t), phase_phi(bath, t), alpha_i, alpha_j);
}

TruncatedSeries taylor_f(const BathSpec& bath, int order) {
    TruncatedSeries out(order);
    for (const auto& m : bath.modes()) {
        const double weight = ratio_squared(m) * (1.0 + 2.0 * m.nbar);
        // 1 - cos(wt) = sum_{n>=1} (-1)^{n+1} (wt)^{2n} / (2n)!
        double term = 1.0; // (w)^k / k!
        for (int k = 1; k <= order; ++k) {
            term *= m.omega / k;
            if (k % 2 == 0) out[k] += weight * ((k / 2) % 2 == 1 ? term : -term);
        }
    }
    return out;
}

TruncatedSeries taylor_phi(const BathSpec& bath, int order) {
    TruncatedSeries out(order);
    for (const auto& m : bath.modes()) {
        const double weight = ratio_squared(m);
        // wt - sin(wt) = sum_{n>=1} (-1)^{n+1} (wt)^{2n+1} / (2n+1)!
        double term = 1.0;
        for (int k = 1; k <= order; ++k) {
            term *= m.omega / k;
            if (k >= 3 && k % 2 == 1) out[k] += weight * (((k - 1) / 2) % 2 == 1 ? term : -term);
        }
    }
    return out;
}

} // namespace envctrl
