#pragma once

#include <Eigen/Dense>

#include "envctrl/model.hpp"

namespace envctrl {

/// Affine action s = A p + a of the reduced dynamics on the probe Bloch vector,
/// valid for a fixed time and initial system state.
struct AffineMap {
    Eigen::Matrix3d A{Eigen::Matrix3d::Zero()};
    Eigen::Vector3d a{Eigen::Vector3d::Zero()};
    double t{0.0};
    QubitState s0{};
};

/// Real and imaginary parts of the single nonzero-alpha decoherence factor.
struct SimplifiedGammas {
    double gamma_re{1.0};
    double gamma_im{0.0};
};

/// Generic path: expand rho_S (x) rho_P in the A_T eigenbasis, scale element
/// (i, j) by gamma_ij(t) and trace out the probe. Valid for every eigenbasis.
DensityMatrix2 evolve_general(const InteractionSpec& interaction, const BathSpec& bath, const DensityMatrix2& rho_s,
                              const DensityMatrix2& rho_p, double t);

/// Closed form for product eigenvectors: only system coherences evolve, each
/// multiplied by a probe-population weighted sum of decoherence factors.
DensityMatrix2 evolve_factorized(const InteractionSpec& interaction, const BathSpec& bath, const DensityMatrix2& rho_s,
                                 const DensityMatrix2& rho_p, double t);

AffineMap bell_affine_map(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0, double t);

/// Affine map for any eigenbasis, read off evolve_general by linearity in the
/// probe state: a is the image of the maximally mixed probe, column k of A the
/// image of +e_k minus a.
AffineMap affine_map(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0, double t);

SimplifiedGammas simplified_gammas(double alpha4, const BathSpec& bath, double t);

/// Bell eigenbasis with alphas (0, 0, 0, alpha4):
///   A = 1/2 [(1 - gamma_re) I - gamma_im [s0]_x],  a = 1/2 (1 + gamma_re) s0
/// where [s0]_x p = s0 x p.
AffineMap simplified_map(double alpha4, const BathSpec& bath, const QubitState& s0, double t);

/// Applies the map. Throws PhysicalityError if the image leaves the Bloch
/// ball by more than 1e-9.
QubitState evolve_bloch(const AffineMap& map, const QubitState& p);

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& v);

} // namespace envctrl
