#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "envctrl/model.hpp"

namespace envctrl::oracle {

inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// Per-mode Fock truncation. The cap bounds the total Hilbert dimension,
/// system dimension included.
struct FockCutoffs {
    std::vector<int> dims;
    std::size_t cap{kDefaultDimensionCap};

    std::size_t bath_dimension() const;
};

/// d_i >= 10 + 20 (g/omega)^2 (1 + 2 nbar), clamped so 4 * prod d_i fits the cap.
FockCutoffs default_cutoffs(const BathSpec& bath, std::size_t cap = kDefaultDimensionCap);

/// Initial bath state, diagonal in the Fock basis. Thermal occupations are
/// truncated Boltzmann weights renormalized over the retained levels.
struct BathState {
    enum class Kind { Vacuum, ThermalDiagonal };
    Kind kind{Kind::Vacuum};
    std::vector<double> nbar;

    static BathState vacuum() { return {}; }
    static BathState thermal(std::vector<double> nbar) { return {Kind::ThermalDiagonal, std::move(nbar)}; }
    static BathState thermal(const BathSpec& bath);
};

/// Truncated annihilation operator: sqrt(n) on the superdiagonal.
Eigen::MatrixXcd annihilation(int d);

/// Diagonal of the bath density matrix over the product Fock basis.
Eigen::VectorXd bath_populations(const BathState& state, const FockCutoffs& cutoffs);

/// H = I (x) H_E + sum_i A (x) g_i (b_i + b_i^dag) for an arbitrary Hermitian
/// system operator A. Basis ordering: system index major, modes in order.
Eigen::MatrixXcd build_hamiltonian(const Eigen::MatrixXcd& system_operator, const BathSpec& bath,
                                   const FockCutoffs& cutoffs);

Eigen::MatrixXcd build_hamiltonian(const InteractionSpec& interaction, const BathSpec& bath, const FockCutoffs& cutoffs);

/// Dense propagator from a generic Hermitian eigendecomposition of H.
class Propagator {
public:
    explicit Propagator(const Eigen::MatrixXcd& hamiltonian);

    Eigen::MatrixXcd unitary(double t) const;
    Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& rho, double t) const;
    Eigen::Index dimension() const { return eigenvalues_.size(); }

private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXcd eigenvectors_;
};

/// Reduced system density matrix after tracing the bath out of a
/// (system (x) bath) operator.
Eigen::MatrixXcd trace_bath(const Eigen::MatrixXcd& rho, Eigen::Index system_dim);

/// Exact dynamics of system (x) probe (x) bath, reduced to the system qubit.
class Simulator {
public:
    Simulator(const InteractionSpec& interaction, const BathSpec& bath, const FockCutoffs& cutoffs);

    DensityMatrix2 evolve(const DensityMatrix2& rho_s, const DensityMatrix2& rho_p, const BathState& bath_state,
                          double t) const;

    const Propagator& propagator() const { return propagator_; }

private:
    FockCutoffs cutoffs_;
    Propagator propagator_;
};

DensityMatrix2 oracle_evolve(const InteractionSpec& interaction, const BathSpec& bath, const DensityMatrix2& rho_s,
                             const DensityMatrix2& rho_p, const BathState& bath_state, const FockCutoffs& cutoffs,
                             double t);

/// Decoherence factor read off a two-level test system coupled through
/// diag(alpha_i, alpha_j), started in |+>.
Complex oracle_gamma(const BathSpec& bath, double alpha_i, double alpha_j, const BathState& bath_state,
                     const FockCutoffs& cutoffs, double t);

} // namespace envctrl::oracle
