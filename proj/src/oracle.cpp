#include "envctrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace envctrl::oracle {

namespace {

void check_cutoffs(const FockCutoffs& cutoffs, std::size_t modes, std::size_t system_dim) {
    if (cutoffs.dims.size() != modes) {
        throw std::invalid_argument("cutoffs list " + std::to_string(cutoffs.dims.size()) + " dimensions for " +
                                    std::to_string(modes) + " bath modes");
    }
    for (int d : cutoffs.dims) {
        if (d < 2) throw std::invalid_argument("every Fock cutoff must be >= 2");
    }
    const std::size_t total = system_dim * cutoffs.bath_dimension();
    if (total > cutoffs.cap) {
        throw std::invalid_argument("Hilbert dimension " + std::to_string(total) + " exceeds cap " +
                                    std::to_string(cutoffs.cap));
    }
}

// Identity on all modes except `which`, where `op` acts.
Eigen::MatrixXcd embed_mode(const Eigen::MatrixXcd& op, std::size_t which, const std::vector<int>& dims) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const Eigen::MatrixXcd factor = i == which ? op : Eigen::MatrixXcd::Identity(dims[i], dims[i]);
        out = Eigen::kroneckerProduct(out, factor).eval();
    }
    return out;
}

} // namespace

std::size_t FockCutoffs::bath_dimension() const {
    std::size_t n = 1;
    for (int d : dims) n *= static_cast<std::size_t>(std::max(d, 0));
    return n;
}

FockCutoffs default_cutoffs(const BathSpec& bath, std::size_t cap) {
    FockCutoffs c;
    c.cap = cap;
    for (const auto& m : bath.modes()) {
        const double r = m.g / m.omega;
        c.dims.push_back(static_cast<int>(std::ceil(10.0 + 20.0 * r * r * (1.0 + 2.0 * m.nbar))));
    }
    // Shrink the largest cutoff until the total fits.
    while (4 * c.bath_dimension() > cap) {
        auto it = std::max_element(c.dims.begin(), c.dims.end());
        if (*it <= 2) throw std::invalid_argument("dimension cap too small for this bath");
        --*it;
    }
    return c;
}

BathState BathState::thermal(const BathSpec& bath) {
    std::vector<double> n;
    for (const auto& m : bath.modes()) n.push_back(m.nbar);
    return thermal(std::move(n));
}

Eigen::MatrixXcd annihilation(int d) {
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n < d; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

Eigen::VectorXd bath_populations(const BathState& state, const FockCutoffs& cutoffs) {
    Eigen::VectorXd pops = Eigen::VectorXd::Ones(1);
    for (std::size_t i = 0; i < cutoffs.dims.size(); ++i) {
        const int d = cutoffs.dims[i];
        Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
        if (state.kind == BathState::Kind::Vacuum) {
            p(0) = 1.0;
        } else {
            if (state.nbar.size() != cutoffs.dims.size()) throw std::invalid_argument("thermal nbar list does not match modes");
            const double nbar = state.nbar[i];
            if (!(nbar >= 0.0)) throw std::invalid_argument("thermal nbar must be >= 0");
            const double ratio = nbar / (1.0 + nbar);
            double w = 1.0;
            for (int n = 0; n < d; ++n, w *= ratio) p(n) = w;
            p /= p.sum();
        }
        Eigen::VectorXd next(pops.size() * d);
        for (Eigen::Index a = 0; a < pops.size(); ++a) next.segment(a * d, d) = pops(a) * p;
        pops = std::move(next);
    }
    return pops;
}

Eigen::MatrixXcd build_hamiltonian(const Eigen::MatrixXcd& system_operator, const BathSpec& bath,
                                   const FockCutoffs& cutoffs) {
    const auto sys_dim = static_cast<std::size_t>(system_operator.rows());
    check_cutoffs(cutoffs, bath.size(), sys_dim);
    const auto bath_dim = static_cast<Eigen::Index>(cutoffs.bath_dimension());

    Eigen::MatrixXcd h_env = Eigen::MatrixXcd::Zero(bath_dim, bath_dim);
    Eigen::MatrixXcd coupling = Eigen::MatrixXcd::Zero(bath_dim, bath_dim);
    for (std::size_t i = 0; i < bath.size(); ++i) {
        const auto& m = bath.modes()[i];
        const Eigen::MatrixXcd b = annihilation(cutoffs.dims[i]);
        const Eigen::MatrixXcd number = b.adjoint() * b;
        const Eigen::MatrixXcd shifted =
            number + 0.5 * Eigen::MatrixXcd::Identity(cutoffs.dims[i], cutoffs.dims[i]);
        h_env += m.omega * embed_mode(shifted, i, cutoffs.dims);
        const Eigen::MatrixXcd position = b + b.adjoint();
        coupling += m.g * embed_mode(position, i, cutoffs.dims);
    }
    const Eigen::MatrixXcd id_sys = Eigen::MatrixXcd::Identity(system_operator.rows(), system_operator.rows());
    Eigen::MatrixXcd h = Eigen::kroneckerProduct(id_sys, h_env);
    h += Eigen::kroneckerProduct(system_operator, coupling);
    return h;
}

Eigen::MatrixXcd build_hamiltonian(const InteractionSpec& interaction, const BathSpec& bath, const FockCutoffs& cutoffs) {
    return build_hamiltonian(Eigen::MatrixXcd(interaction.operator_matrix()), bath, cutoffs);
}

Propagator::Propagator(const Eigen::MatrixXcd& hamiltonian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian);
    if (es.info() != Eigen::Success) throw std::runtime_error("Hamiltonian eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
}

Eigen::MatrixXcd Propagator::unitary(double t) const {
    Eigen::VectorXcd phases(eigenvalues_.size());
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) phases(k) = std::polar(1.0, -eigenvalues_(k) * t);
    return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

Eigen::MatrixXcd Propagator::evolve(const Eigen::MatrixXcd& rho, double t) const {
    const Eigen::MatrixXcd u = unitary(t);
    return u * rho * u.adjoint();
}

Eigen::MatrixXcd trace_bath(const Eigen::MatrixXcd& rho, Eigen::Index system_dim) {
    const Eigen::Index bath_dim = rho.rows() / system_dim;
    Eigen::MatrixXcd out(system_dim, system_dim);
    for (Eigen::Index a = 0; a < system_dim; ++a)
        for (Eigen::Index b = 0; b < system_dim; ++b)
            out(a, b) = rho.block(a * bath_dim, b * bath_dim, bath_dim, bath_dim).trace();
    return out;
}

Simulator::Simulator(const InteractionSpec& interaction, const BathSpec& bath, const FockCutoffs& cutoffs)
    : cutoffs_(cutoffs), propagator_(build_hamiltonian(interaction, bath, cutoffs)) {}

DensityMatrix2 Simulator::evolve(const DensityMatrix2& rho_s, const DensityMatrix2& rho_p, const BathState& bath_state,
                                 double t) const {
    const Eigen::Matrix4cd joint = Eigen::kroneckerProduct(rho_s.matrix(), rho_p.matrix());
    const Eigen::VectorXd pops = bath_populations(bath_state, cutoffs_);
    const Eigen::MatrixXcd rho_env = pops.cast<Complex>().asDiagonal();
    const Eigen::MatrixXcd rho0 = Eigen::kroneckerProduct(Eigen::MatrixXcd(joint), rho_env);
    const Eigen::MatrixXcd reduced = trace_bath(propagator_.evolve(rho0, t), 4);
    const Eigen::Matrix2cd out = partial_trace_probe(Eigen::Matrix4cd(reduced));
    try {
        return DensityMatrix2(out);
    } catch (const std::invalid_argument& e) {
        throw PhysicalityError(std::string("oracle_evolve: ") + e.what());
    }
}

DensityMatrix2 oracle_evolve(const InteractionSpec& interaction, const BathSpec& bath, const DensityMatrix2& rho_s,
                             const DensityMatrix2& rho_p, const BathState& bath_state, const FockCutoffs& cutoffs,
                             double t) {
    return Simulator(interaction, bath, cutoffs).evolve(rho_s, rho_p, bath_state, t);
}

Complex oracle_gamma(const BathSpec& bath, double alpha_i, double alpha_j, const BathState& bath_state,
                     const FockCutoffs& cutoffs, double t) {
    Eigen::MatrixXcd coupling = Eigen::MatrixXcd::Zero(2, 2);
    coupling(0, 0) = alpha_i;
    coupling(1, 1) = alpha_j;
    const Propagator propagator(build_hamiltonian(coupling, bath, cutoffs));

    const Eigen::VectorXd pops = bath_populations(bath_state, cutoffs);
    const Eigen::MatrixXcd rho_env = pops.cast<Complex>().asDiagonal();
    const Eigen::MatrixXcd plus = Eigen::MatrixXcd::Constant(2, 2, Complex(0.5, 0.0));
    const Eigen::MatrixXcd rho0 = Eigen::kroneckerProduct(plus, rho_env);
    const Eigen::MatrixXcd reduced = trace_bath(propagator.evolve(rho0, t), 2);
    return 2.0 * reduced(0, 1);
}

} // namespace envctrl::oracle
