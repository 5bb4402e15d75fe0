#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "envctrl/dynamics.hpp"
#include "envctrl/model.hpp"
#include "envctrl/series.hpp"

namespace envctrl {

/// Image of the unit Bloch ball under an affine map at fixed time.
struct Ellipsoid {
    Eigen::Vector3d center{Eigen::Vector3d::Zero()};
    Eigen::Vector3d semi_axes{Eigen::Vector3d::Zero()}; // descending
    Eigen::Matrix3d axes{Eigen::Matrix3d::Identity()};  // column k pairs with semi_axes(k)

    Eigen::Vector3d surface_point(const Eigen::Vector3d& unit_direction) const;

    // Normalized radius of x; <= 1 inside. Offsets along a zero semi-axis
    // larger than `tolerance` give +inf.
    double mahalanobis(const Eigen::Vector3d& x, double tolerance = 1e-12) const;

    // Smallest delta such that x lies in the ellipsoid with every semi-axis
    // grown by delta; an upper bound on the Euclidean distance from x to the
    // ellipsoid, 0 inside. Unlike mahalanobis it stays well-conditioned for
    // flat ellipsoids.
    double excess(const Eigen::Vector3d& x) const;
    bool contains(const Eigen::Vector3d& x, double tolerance = 1e-9) const;
};

Ellipsoid reachable_ellipsoid(const AffineMap& map);

/// Deterministic, nearly uniform unit vectors.
std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t n);

/// Sampled union of reachable sets over a time grid. Time steps must be
/// added in non-decreasing order.
class ReachableUnion {
public:
    void add(double t, std::vector<Eigen::Vector3d> points);

    std::size_t steps() const { return times_.size(); }
    std::vector<Eigen::Vector3d> points_until(double horizon) const;
    // Every sampled point up to horizon_small also belongs to the union up to horizon_large.
    bool is_subset(double horizon_small, double horizon_large) const;

private:
    std::vector<double> times_;
    std::vector<std::vector<Eigen::Vector3d>> points_;
};

enum class AccessStatus { AccessibleSufficient, Inconclusive };

struct AccessVerdict {
    // (a2-a4)^2 != (a1-a3)^2, (a1-a4)^2 != (a2-a3)^2, (a3-a4)^2 != (a1-a2)^2
    std::array<bool, 3> conditions{};
    bool holds{false};
    std::optional<double> certificate;
    AccessStatus status{AccessStatus::Inconclusive};
};

const char* to_string(AccessStatus status);

/// Sufficient test only. Each inequality is treated as violated when the two
/// sides agree within 1e-9 of the largest squared eigenvalue gap.
AccessVerdict accessibility_check(const InteractionSpec::Alphas& alphas);

/// As above, with the sixth-derivative certificate attached (Bell eigenbasis only).
AccessVerdict accessibility_check(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0);

/// Maclaurin series of det A(t, s0) for the Bell-case affine map.
TruncatedSeries det_series(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0,
                           int order = TruncatedSeries::kDefaultOrder);

/// d^6/dt^6 det A at t = 0. Throws std::logic_error if any lower coefficient
/// exceeds 1e-12 in magnitude.
double detA_sixth_derivative(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0,
                             int order = TruncatedSeries::kDefaultOrder);

/// Thrown when the bath frequencies share no common base frequency.
class IncommensurateBath : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommensurateBase {
    double omega0{1.0};
    std::vector<long long> multiples; // omega_i = multiples[i] * omega0
};

/// Rationalizes omega_i / omega_1 by continued fractions (denominator <= 1e4,
/// relative tolerance 1e-9). Returns nullopt for an incommensurate bath.
std::optional<CommensurateBase> detect_commensurate_base(const BathSpec& bath);

/// Checks a caller-supplied base; throws IncommensurateBath if some omega_i is
/// not an integer multiple of it.
CommensurateBase commensurate_base(const BathSpec& bath, std::optional<double> omega0 = std::nullopt);

struct SwapSolution {
    double t_hat{0.0};
    long long k1{0};
    std::vector<long long> k2;
    double alpha4{0.0};
};

/// Times t = 2 pi j / omega0 at which f vanishes and alpha4^2 phi(t) is an odd
/// multiple of pi, for k1 = 0..k1_max. Sorted by t_hat.
std::vector<SwapSolution> swap_times(const BathSpec& bath, double alpha4, long long k1_max,
                                     std::optional<double> omega0 = std::nullopt);

/// Positive alpha4 with 1 / alpha4^2 = 2 / (2 k1 + 1) * sum_i k2_i (g_i / omega_i)^2.
double design_alpha4(const BathSpec& bath, long long k1, std::span<const long long> k2);

} // namespace envctrl
