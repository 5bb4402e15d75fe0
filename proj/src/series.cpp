#include "envctrl/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace envctrl {

namespace {

int checked_order(int order) {
    if (order < 0 || order > TruncatedSeries::kMaxOrder) {
        throw std::invalid_argument("series order " + std::to_string(order) + " outside [0, " +
                                    std::to_string(TruncatedSeries::kMaxOrder) + "]");
    }
    return order;
}

// sin and cos share one recurrence: s' = c x', c' = -s x'.
std::pair<TruncatedSeries, TruncatedSeries> sin_cos(const TruncatedSeries& x) {
    const int K = x.order();
    TruncatedSeries s(K), c(K);
    s[0] = std::sin(x[0]);
    c[0] = std::cos(x[0]);
    for (int k = 1; k <= K; ++k) {
        double sk = 0.0, ck = 0.0;
        for (int j = 1; j <= k; ++j) {
            const double jx = j * x[j];
            sk += jx * c[k - j];
            ck -= jx * s[k - j];
        }
        s[k] = sk / k;
        c[k] = ck / k;
    }
    return {std::move(s), std::move(c)};
}

} // namespace

TruncatedSeries::TruncatedSeries(int order) : coeffs_(checked_order(order) + 1, 0.0) {}

TruncatedSeries::TruncatedSeries(int order, double constant) : TruncatedSeries(order) {
    coeffs_[0] = constant;
}

TruncatedSeries::TruncatedSeries(int order, std::vector<double> coefficients) : TruncatedSeries(order) {
    const auto n = std::min(coefficients.size(), coeffs_.size());
    std::copy_n(coefficients.begin(), n, coeffs_.begin());
}

double TruncatedSeries::evaluate(double t) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double TruncatedSeries::derivative_at_zero(int k) const {
    if (k < 0 || k > order()) {
        throw std::out_of_range("derivative order " + std::to_string(k) + " exceeds series order " +
                                std::to_string(order()));
    }
    return std::tgamma(k + 1.0) * coeffs_[k];
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& rhs) {
    coeffs_.resize(std::min(coeffs_.size(), rhs.coeffs_.size()));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& rhs) {
    coeffs_.resize(std::min(coeffs_.size(), rhs.coeffs_.size()));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
    return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

TruncatedSeries operator*(const TruncatedSeries& lhs, const TruncatedSeries& rhs) {
    const int K = std::min(lhs.order(), rhs.order());
    TruncatedSeries out(K);
    for (int k = 0; k <= K; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= k; ++j) acc += lhs[j] * rhs[k - j];
        out[k] = acc;
    }
    return out;
}

TruncatedSeries exp(const TruncatedSeries& x) {
    const int K = x.order();
    TruncatedSeries out(K);
    out[0] = std::exp(x[0]);
    for (int k = 1; k <= K; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += j * x[j] * out[k - j];
        out[k] = acc / k;
    }
    return out;
}

TruncatedSeries sin(const TruncatedSeries& x) { return sin_cos(x).first; }

TruncatedSeries cos(const TruncatedSeries& x) { return sin_cos(x).second; }

} // namespace envctrl
