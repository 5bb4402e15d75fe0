#include "envctrl/dynamics.hpp"

#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace envctrl {

namespace {

constexpr double kBallTolerance = 1e-9;

DensityMatrix2 checked_output(const Eigen::Matrix2cd& rho, const char* where) {
    try {
        return DensityMatrix2(rho);
    } catch (const std::invalid_argument& e) {
        throw PhysicalityError(std::string(where) + ": " + e.what());
    }
}

} // namespace

DensityMatrix2 evolve_general(const InteractionSpec& interaction, const BathSpec& bath, const DensityMatrix2& rho_s,
                              const DensityMatrix2& rho_p, double t) {
    const Eigen::Matrix4cd& v = interaction.eigenvectors();
    const auto& alpha = interaction.alphas();
    const Eigen::Matrix4cd joint = Eigen::kroneckerProduct(rho_s.matrix(), rho_p.matrix());
    const Eigen::Matrix4cd in_eigenbasis = v.adjoint() * joint * v;

    const double f = dephasing_f(bath, t);
    const double phi = phase_phi(bath, t);

    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const Eigen::Matrix4cd outer = v.col(i) * v.col(j).adjoint();
            out += partial_trace_probe(outer) * (in_eigenbasis(i, j) * gamma_from(f, phi, alpha[i], alpha[j]));
        }
    }
    return checked_output(out, "evolve_general");
}

DensityMatrix2 evolve_factorized(const InteractionSpec& interaction, const BathSpec& bath, const DensityMatrix2& rho_s,
                                 const DensityMatrix2& rho_p, double t) {
    if (interaction.eigenbasis() != Eigenbasis::Factorized) {
        throw std::invalid_argument("evolve_factorized requires a factorized eigenbasis");
    }
    const auto& alpha = interaction.alphas();
    const double f = dephasing_f(bath, t);
    const double phi = phase_phi(bath, t);
    const auto index = [](int k, int l) { return 2 * k + l; };

    Eigen::Matrix2cd out;
    for (int k = 0; k < 2; ++k) {
        for (int m = 0; m < 2; ++m) {
            Complex weight{0.0, 0.0};
            for (int n = 0; n < 2; ++n) {
                weight += rho_p.matrix()(n, n) * gamma_from(f, phi, alpha[index(k, n)], alpha[index(m, n)]);
            }
            out(k, m) = rho_s.matrix()(k, m) * weight;
        }
    }
    return checked_output(out, "evolve_factorized");
}

AffineMap bell_affine_map(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0, double t) {
    if (interaction.eigenbasis() != Eigenbasis::Bell) {
        throw std::invalid_argument("bell_affine_map requires the Bell eigenbasis");
    }
    const auto& alpha = interaction.alphas();
    const double f = dephasing_f(bath, t);
    const double phi = phase_phi(bath, t);
    // 1-based labels to match the conventional Bell ordering.
    const auto g = [&](int i, int j) { return gamma_from(f, phi, alpha[i - 1], alpha[j - 1]); };
    const Complex I{0.0, 1.0};
    const double sx = s0.x(), sy = s0.y(), sz = s0.z();

    const Complex g13m24 = g(1, 3) - g(2, 4), g13p24 = g(1, 3) + g(2, 4);
    const Complex g14m23 = g(1, 4) - g(2, 3), g23m14 = g(2, 3) - g(1, 4), g23p14 = g(2, 3) + g(1, 4);
    const Complex g12p34 = g(1, 2) + g(3, 4), g34m12 = g(3, 4) - g(1, 2), g12m34 = g(1, 2) - g(3, 4);

    AffineMap map;
    map.t = t;
    map.s0 = s0;
    // clang-format off
    map.A << (I * g13m24).imag(),   (sz * g13m24).imag(), (sy * g13p24).imag(),
             (sz * g14m23).imag(),  (I * g23m14).imag(),  (-sx * g23p14).imag(),
             (-sy * g12p34).imag(), (sx * g34m12).imag(), (I * g12m34).imag();
    // clang-format on
    map.A *= 0.5;
    map.a << (sx * g13p24).real(), (sy * g23p14).real(), (sz * g12p34).real();
    map.a *= 0.5;
    return map;
}

AffineMap affine_map(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0, double t) {
    const DensityMatrix2 rho_s = DensityMatrix2::from_bloch(s0);
    const auto image = [&](const Eigen::Vector3d& p) {
        return evolve_general(interaction, bath, rho_s, DensityMatrix2::from_bloch(QubitState(p)), t).bloch().bloch();
    };
    AffineMap map;
    map.t = t;
    map.s0 = s0;
    map.a = image(Eigen::Vector3d::Zero());
    for (int k = 0; k < 3; ++k) map.A.col(k) = image(Eigen::Vector3d::Unit(k)) - map.a;
    return map;
}

SimplifiedGammas simplified_gammas(double alpha4, const BathSpec& bath, double t) {
    const double a2 = alpha4 * alpha4;
    const double magnitude = std::exp(-a2 * dephasing_f(bath, t));
    const double angle = a2 * phase_phi(bath, t);
    return {magnitude * std::cos(angle), magnitude * std::sin(angle)};
}

AffineMap simplified_map(double alpha4, const BathSpec& bath, const QubitState& s0, double t) {
    const SimplifiedGammas gs = simplified_gammas(alpha4, bath, t);
    AffineMap map;
    map.t = t;
    map.s0 = s0;
    map.A = 0.5 * ((1.0 - gs.gamma_re) * Eigen::Matrix3d::Identity() - gs.gamma_im * cross_matrix(s0.bloch()));
    map.a = 0.5 * (1.0 + gs.gamma_re) * s0.bloch();
    return map;
}

QubitState evolve_bloch(const AffineMap& map, const QubitState& p) {
    Eigen::Vector3d s = map.A * p.bloch() + map.a;
    const double n = s.norm();
    if (n > 1.0 + kBallTolerance) {
        throw PhysicalityError("evolve_bloch: image norm " + std::to_string(n) + " outside the Bloch ball");
    }
    if (n > 1.0) s /= n;
    return QubitState(s);
}

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    // clang-format off
    m <<     0, -v.z(),  v.y(),
         v.z(),      0, -v.x(),
        -v.y(),  v.x(),      0;
    // clang-format on
    return m;
}

} // namespace envctrl
