#include "envctrl/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace envctrl {

namespace {

constexpr double kRationalTolerance = 1e-9;
// Above ~3e4 every irrational has a convergent within the tolerance.
constexpr long long kMaxDenominator = 10'000;
constexpr long long kMaxSearchSteps = 10'000'000;

struct Fraction {
    long long num;
    long long den;
};

std::optional<Fraction> rationalize(double x) {
    // Convergents of the continued fraction of x > 0.
    long long h_prev = 1, h = static_cast<long long>(std::floor(x));
    long long k_prev = 0, k = 1;
    double rem = x - std::floor(x);
    while (true) {
        if (std::abs(x - static_cast<double>(h) / static_cast<double>(k)) <= kRationalTolerance * x) return Fraction{h, k};
        if (rem < 1e-15) return std::nullopt;
        const double inv = 1.0 / rem;
        const auto a = static_cast<long long>(std::floor(inv));
        rem = inv - std::floor(inv);
        const long long h_next = a * h + h_prev;
        const long long k_next = a * k + k_prev;
        if (k_next > kMaxDenominator) return std::nullopt;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
}

struct ComplexSeries {
    TruncatedSeries re;
    TruncatedSeries im;
};

ComplexSeries operator+(const ComplexSeries& x, const ComplexSeries& y) { return {x.re + y.re, x.im + y.im}; }
ComplexSeries operator-(const ComplexSeries& x, const ComplexSeries& y) { return {x.re - y.re, x.im - y.im}; }

} // namespace

Eigen::Vector3d Ellipsoid::surface_point(const Eigen::Vector3d& unit_direction) const {
    return center + axes * semi_axes.cwiseProduct(unit_direction);
}

double Ellipsoid::mahalanobis(const Eigen::Vector3d& x, double tolerance) const {
    const Eigen::Vector3d local = axes.transpose() * (x - center);
    double r2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (semi_axes(k) > tolerance) {
            const double u = local(k) / semi_axes(k);
            r2 += u * u;
        } else if (std::abs(local(k)) > tolerance) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return std::sqrt(r2);
}

double Ellipsoid::excess(const Eigen::Vector3d& x) const {
    const Eigen::Vector3d local = axes.transpose() * (x - center);
    const auto inside = [&](double delta) {
        double r2 = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double r = semi_axes(k) + delta;
            if (r > 0.0) {
                r2 += (local(k) / r) * (local(k) / r);
            } else if (local(k) != 0.0) {
                return false;
            }
        }
        return r2 <= 1.0;
    };
    if (inside(0.0)) return 0.0;
    // At delta = |local| every grown axis is at least |local|.
    double lo = 0.0, hi = local.norm();
    for (int it = 0; it < 100 && hi - lo > 1e-3 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? hi : lo) = mid;
    }
    return hi;
}

bool Ellipsoid::contains(const Eigen::Vector3d& x, double tolerance) const {
    return excess(x) <= tolerance;
}

Ellipsoid reachable_ellipsoid(const AffineMap& map) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(map.A, Eigen::ComputeFullU);
    Ellipsoid e;
    e.center = map.a;
    e.semi_axes = svd.singularValues();
    e.axes = svd.matrixU();
    return e;
}

std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t n) {
    std::vector<Eigen::Vector3d> out;
    out.reserve(n);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = n == 1 ? 1.0 : 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double theta = golden * static_cast<double>(i);
        out.emplace_back(r * std::cos(theta), r * std::sin(theta), z);
    }
    return out;
}

void ReachableUnion::add(double t, std::vector<Eigen::Vector3d> points) {
    if (!times_.empty() && t < times_.back()) throw std::invalid_argument("ReachableUnion: time steps must be non-decreasing");
    times_.push_back(t);
    points_.push_back(std::move(points));
}

std::vector<Eigen::Vector3d> ReachableUnion::points_until(double horizon) const {
    std::vector<Eigen::Vector3d> out;
    for (std::size_t i = 0; i < times_.size() && times_[i] <= horizon; ++i) {
        out.insert(out.end(), points_[i].begin(), points_[i].end());
    }
    return out;
}

bool ReachableUnion::is_subset(double horizon_small, double horizon_large) const {
    const auto small = points_until(horizon_small);
    const auto large = points_until(horizon_large);
    return std::all_of(small.begin(), small.end(), [&](const Eigen::Vector3d& p) {
        return std::any_of(large.begin(), large.end(), [&](const Eigen::Vector3d& q) { return p == q; });
    });
}

const char* to_string(AccessStatus status) {
    return status == AccessStatus::AccessibleSufficient ? "AccessibleSufficient" : "Inconclusive";
}

AccessVerdict accessibility_check(const InteractionSpec::Alphas& alphas) {
    const auto sq = [&](int i, int j) {
        const double d = alphas[i - 1] - alphas[j - 1];
        return d * d;
    };
    const std::array<std::array<double, 2>, 3> sides{{{sq(2, 4), sq(1, 3)}, {sq(1, 4), sq(2, 3)}, {sq(3, 4), sq(1, 2)}}};
    double scale = 0.0;
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j) scale = std::max(scale, sq(i, j));

    AccessVerdict v;
    for (std::size_t c = 0; c < 3; ++c) {
        v.conditions[c] = std::abs(sides[c][0] - sides[c][1]) > 1e-9 * scale;
    }
    v.holds = std::all_of(v.conditions.begin(), v.conditions.end(), [](bool b) { return b; });
    v.status = v.holds ? AccessStatus::AccessibleSufficient : AccessStatus::Inconclusive;
    return v;
}

AccessVerdict accessibility_check(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0) {
    AccessVerdict v = accessibility_check(interaction.alphas());
    if (interaction.eigenbasis() == Eigenbasis::Bell) v.certificate = detA_sixth_derivative(interaction, bath, s0);
    return v;
}

TruncatedSeries det_series(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0, int order) {
    if (interaction.eigenbasis() != Eigenbasis::Bell) throw std::invalid_argument("det_series requires the Bell eigenbasis");
    const TruncatedSeries f = taylor_f(bath, order);
    const TruncatedSeries phi = taylor_phi(bath, order);
    const auto& alpha = interaction.alphas();

    const auto g = [&](int i, int j) {
        const double ai = alpha[i - 1], aj = alpha[j - 1];
        const TruncatedSeries magnitude = exp(-((ai - aj) * (ai - aj)) * f);
        const TruncatedSeries angle = (ai * ai - aj * aj) * phi;
        return ComplexSeries{magnitude * cos(angle), magnitude * sin(angle)};
    };
    const double sx = s0.x(), sy = s0.y(), sz = s0.z();

    const ComplexSeries g13m24 = g(1, 3) - g(2, 4), g13p24 = g(1, 3) + g(2, 4);
    const ComplexSeries g14m23 = g(1, 4) - g(2, 3), g23m14 = g(2, 3) - g(1, 4), g23p14 = g(2, 3) + g(1, 4);
    const ComplexSeries g12p34 = g(1, 2) + g(3, 4), g34m12 = g(3, 4) - g(1, 2), g12m34 = g(1, 2) - g(3, 4);

    // Im(i z) = Re z, Im(c z) = c Im z for real c.
    const TruncatedSeries a11 = 0.5 * g13m24.re, a12 = 0.5 * sz * g13m24.im, a13 = 0.5 * sy * g13p24.im;
    const TruncatedSeries a21 = 0.5 * sz * g14m23.im, a22 = 0.5 * g23m14.re, a23 = -0.5 * sx * g23p14.im;
    const TruncatedSeries a31 = -0.5 * sy * g12p34.im, a32 = 0.5 * sx * g34m12.im, a33 = 0.5 * g12m34.re;

    return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) + a13 * (a21 * a32 - a22 * a31);
}

double detA_sixth_derivative(const InteractionSpec& interaction, const BathSpec& bath, const QubitState& s0, int order) {
    if (order < 6) throw std::invalid_argument("detA_sixth_derivative needs series order >= 6");
    const TruncatedSeries det = det_series(interaction, bath, s0, order);
    for (int k = 0; k < 6; ++k) {
        if (std::abs(det[k]) > 1e-12) {
            throw std::logic_error("det A has a nonvanishing t^" + std::to_string(k) + " coefficient");
        }
    }
    return det.derivative_at_zero(6);
}

std::optional<CommensurateBase> detect_commensurate_base(const BathSpec& bath) {
    const auto& modes = bath.modes();
    const double ref = modes.front().omega;
    std::vector<Fraction> ratios;
    long long lcm = 1;
    for (const auto& m : modes) {
        const auto r = rationalize(m.omega / ref);
        if (!r || r->num <= 0) return std::nullopt;
        ratios.push_back(*r);
        lcm = std::lcm(lcm, r->den);
        if (lcm > kMaxDenominator) return std::nullopt;
    }
    CommensurateBase base;
    long long common = 0;
    for (const auto& r : ratios) {
        base.multiples.push_back(r.num * (lcm / r.den));
        common = std::gcd(common, base.multiples.back());
    }
    for (auto& m : base.multiples) m /= common;
    base.omega0 = ref * static_cast<double>(common) / static_cast<double>(lcm);
    return base;
}

CommensurateBase commensurate_base(const BathSpec& bath, std::optional<double> omega0) {
    if (!omega0) {
        auto detected = detect_commensurate_base(bath);
        if (!detected) throw IncommensurateBath("bath frequencies have no common base frequency");
        return *detected;
    }
    if (!(*omega0 > 0.0) || !std::isfinite(*omega0)) throw std::invalid_argument("base frequency must be finite and > 0");
    CommensurateBase base{*omega0, {}};
    for (const auto& m : bath.modes()) {
        const double ratio = m.omega / *omega0;
        const double n = std::round(ratio);
        if (n < 1.0 || std::abs(ratio - n) > kRationalTolerance * ratio) {
            throw IncommensurateBath("omega " + std::to_string(m.omega) + " is not an integer multiple of base " +
                                     std::to_string(*omega0));
        }
        base.multiples.push_back(static_cast<long long>(n));
    }
    return base;
}

std::vector<SwapSolution> swap_times(const BathSpec& bath, double alpha4, long long k1_max, std::optional<double> omega0) {
    if (k1_max < 0) throw std::invalid_argument("k1_max must be >= 0");
    const CommensurateBase base = commensurate_base(bath, omega0);

    // At t = 2 pi j / omega0 the sine terms vanish and alpha4^2 phi / pi = 2 j alpha4^2 S.
    double S = 0.0;
    for (std::size_t i = 0; i < bath.size(); ++i) {
        const auto& m = bath.modes()[i];
        S += (m.g / m.omega) * (m.g / m.omega) * static_cast<double>(base.multiples[i]);
    }
    const double a2 = alpha4 * alpha4;
    std::vector<SwapSolution> out;
    if (!(a2 * S > 0.0)) return out;

    const double upper = static_cast<double>(2 * k1_max + 1);
    const double j_max = std::floor(upper * (1.0 + kRationalTolerance) / (2.0 * a2 * S));
    if (j_max > static_cast<double>(kMaxSearchSteps)) {
        throw std::invalid_argument("swap search would scan more than 1e7 candidate times; raise alpha4 or lower k1_max");
    }
    for (long long j = 1; j <= static_cast<long long>(j_max); ++j) {
        const double t_hat = 2.0 * std::numbers::pi * static_cast<double>(j) / base.omega0;
        const double x = a2 * phase_phi(bath, t_hat) / std::numbers::pi;
        const double k = std::round((x - 1.0) / 2.0);
        if (k < 0.0 || k > static_cast<double>(k1_max)) continue;
        const double odd = 2.0 * k + 1.0;
        if (std::abs(x - odd) > kRationalTolerance * odd) continue;
        SwapSolution sol{t_hat, static_cast<long long>(k), {}, alpha4};
        for (long long m : base.multiples) sol.k2.push_back(j * m);
        out.push_back(std::move(sol));
    }
    return out;
}

double design_alpha4(const BathSpec& bath, long long k1, std::span<const long long> k2) {
    if (k2.size() != bath.size()) {
        throw std::invalid_argument("k2 has " + std::to_string(k2.size()) + " entries but the bath has " +
                                    std::to_string(bath.size()) + " modes");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < k2.size(); ++i) {
        const auto& m = bath.modes()[i];
        sum += static_cast<double>(k2[i]) * (m.g / m.omega) * (m.g / m.omega);
    }
    const double inv_a2 = 2.0 / static_cast<double>(2 * k1 + 1) * sum;
    if (!(inv_a2 > 0.0)) throw std::invalid_argument("design_alpha4: 2/(2k1+1) * sum k2 (g/omega)^2 must be > 0");

    // Every mode must return to phase zero at the same time 2 pi k2_i / omega_i.
    const double t_ref = 2.0 * std::numbers::pi * static_cast<double>(k2[0]) / bath.modes()[0].omega;
    for (std::size_t i = 0; i < k2.size(); ++i) {
        const double t_i = 2.0 * std::numbers::pi * static_cast<double>(k2[i]) / bath.modes()[i].omega;
        if (k2[i] <= 0 || std::abs(t_i - t_ref) > kRationalTolerance * t_ref) {
            throw std::invalid_argument("design_alpha4: k2 is not consistent with a single swap time");
        }
    }
    return 1.0 / std::sqrt(inv_a2);
}

} // namespace envctrl
