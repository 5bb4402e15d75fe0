#pragma once

#include <cstddef>
#include <vector>

namespace envctrl {

/// Maclaurin polynomial of a real function of time, truncated at a fixed order.
///
/// Every arithmetic result keeps the smaller of its operands' orders, so a
/// product never carries coefficients that were not computed exactly.
class TruncatedSeries {
public:
    static constexpr int kDefaultOrder = 8;
    static constexpr int kMaxOrder = 12;

    explicit TruncatedSeries(int order = kDefaultOrder);
    TruncatedSeries(int order, double constant);
    TruncatedSeries(int order, std::vector<double> coefficients);

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }

    double operator[](std::size_t k) const { return coeffs_.at(k); }
    double& operator[](std::size_t k) { return coeffs_.at(k); }
    const std::vector<double>& coefficients() const { return coeffs_; }

    double evaluate(double t) const;

    // k-th derivative at t = 0, i.e. k! * c_k.
    double derivative_at_zero(int k) const;

    TruncatedSeries& operator+=(const TruncatedSeries& rhs);
    TruncatedSeries& operator-=(const TruncatedSeries& rhs);
    TruncatedSeries& operator*=(double s);

    friend TruncatedSeries operator+(TruncatedSeries lhs, const TruncatedSeries& rhs) { return lhs += rhs; }
    friend TruncatedSeries operator-(TruncatedSeries lhs, const TruncatedSeries& rhs) { return lhs -= rhs; }
    friend TruncatedSeries operator*(TruncatedSeries lhs, double s) { return lhs *= s; }
    friend TruncatedSeries operator*(double s, TruncatedSeries rhs) { return rhs *= s; }
    friend TruncatedSeries operator-(TruncatedSeries x) { return x *= -1.0; }
    friend TruncatedSeries operator*(const TruncatedSeries& lhs, const TruncatedSeries& rhs);

private:
    std::vector<double> coeffs_;
};

TruncatedSeries exp(const TruncatedSeries& x);
TruncatedSeries sin(const TruncatedSeries& x);
TruncatedSeries cos(const TruncatedSeries& x);

} // namespace envctrl
