#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "envctrl/series.hpp"

namespace envctrl {

using Complex = std::complex<double>;

/// Raised when a computed state leaves the physical set beyond tolerance.
/// Distinct from std::invalid_argument, which flags bad inputs.
class PhysicalityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One harmonic oscillator of the bath. Units: hbar = 1.
struct BathMode {
    double omega{1.0}; // angular frequency, > 0
    double g{0.0};     // linear coupling to A_T
    double nbar{0.0};  // mean thermal occupation, >= 0
};

class BathSpec {
public:
    explicit BathSpec(std::vector<BathMode> modes);

    const std::vector<BathMode>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }

private:
    std::vector<BathMode> modes_;
};

enum class Eigenbasis { Factorized, Bell, General };

/// The bath-coupled operator A_T on system (x) probe, given by its spectrum.
///
/// Basis ordering of the 4-dim space is |s> (x) |p> -> index 2*s + p.
/// Factorized: eigenvector i = (k, l) is |k>|l> with i = 2k + l.
/// Bell: (|00> + |11>), (|00> - |11>), (|01> + |10>), (|01> - |10>), each / sqrt 2.
/// General: the columns of a caller-supplied unitary.
class InteractionSpec {
public:
    using Alphas = std::array<double, 4>;

    static InteractionSpec factorized(const Alphas& alphas);
    static InteractionSpec bell(const Alphas& alphas);
    static InteractionSpec general(const Alphas& alphas, const Eigen::Matrix4cd& eigenvectors);

    const Alphas& alphas() const { return alphas_; }
    Eigenbasis eigenbasis() const { return basis_; }
    const Eigen::Matrix4cd& eigenvectors() const { return vectors_; }

    // A_T = V diag(alpha) V^dagger
    Eigen::Matrix4cd operator_matrix() const;

private:
    InteractionSpec(const Alphas& alphas, Eigenbasis basis, const Eigen::Matrix4cd& vectors);

    Alphas alphas_;
    Eigenbasis basis_;
    Eigen::Matrix4cd vectors_;
};

/// Coherence vector of a qubit, rho = (I + s . sigma) / 2.
class QubitState {
public:
    static constexpr double kNormTolerance = 1e-12;

    QubitState() = default;
    explicit QubitState(const Eigen::Vector3d& bloch);
    QubitState(double x, double y, double z) : QubitState(Eigen::Vector3d(x, y, z)) {}

    const Eigen::Vector3d& bloch() const { return bloch_; }
    double x() const { return bloch_.x(); }
    double y() const { return bloch_.y(); }
    double z() const { return bloch_.z(); }

private:
    Eigen::Vector3d bloch_{Eigen::Vector3d::Zero()};
};

class DensityMatrix2 {
public:
    static constexpr double kTolerance = 1e-12;

    DensityMatrix2();
    explicit DensityMatrix2(const Eigen::Matrix2cd& rho);

    static DensityMatrix2 from_bloch(const QubitState& s);

    const Eigen::Matrix2cd& matrix() const { return rho_; }
    QubitState bloch() const;
    double purity() const;
    double min_eigenvalue() const;

private:
    Eigen::Matrix2cd rho_;
};

// Deviation measures shared by validation and tests.
double hermiticity_error(const Eigen::MatrixXcd& m);
double trace_error(const Eigen::MatrixXcd& m);

/// Tr_P of an operator on system (x) probe, ordering 2*s + p.
Eigen::Matrix2cd partial_trace_probe(const Eigen::Matrix4cd& m);

double bose_occupation(double omega, double temperature);

double dephasing_f(const BathSpec& bath, double t);
double phase_phi(const BathSpec& bath, double t);

/// Decoherence factor exp(-(ai - aj)^2 f(t) + i (ai^2 - aj^2) phi(t)).
Complex gamma(const BathSpec& bath, double alpha_i, double alpha_j, double t);

/// Same factor when f(t) and phi(t) are already known.
Complex gamma_from(double f, double phi, double alpha_i, double alpha_j);

TruncatedSeries taylor_f(const BathSpec& bath, int order = TruncatedSeries::kDefaultOrder);
TruncatedSeries taylor_phi(const BathSpec& bath, int order = TruncatedSeries::kDefaultOrder);

} // namespace envctrl
