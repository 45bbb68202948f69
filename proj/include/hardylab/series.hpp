#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardylab {

using cplx = std::complex<double>;

/// Raised for inputs that violate an operation's mathematical precondition
/// (|z| >= 1, truncation mismatch, critical point, ...). The CLI maps it to
/// exit status 2; plain std::invalid_argument is a usage error.
class MathError : public std::runtime_error {
public:
    MathError(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Truncated Taylor expansion at 0 of a function analytic on the unit disc.
///
/// `exact_degree` describes the underlying function, not the truncation: a
/// value d says the function is a polynomial of degree at most d, so that
/// every coefficient past d is exactly zero. std::nullopt means "infinite".
class PowerSeries {
public:
    PowerSeries() = default;
    PowerSeries(std::vector<cplx> coeffs, std::optional<int> exact_degree);

    static PowerSeries zero(std::size_t n);
    static PowerSeries constant(cplx c, std::size_t n);
    static PowerSeries identity(std::size_t n);  // z
    static PowerSeries polynomial(std::span<const cplx> coeffs, std::size_t n);

    std::size_t truncation() const noexcept { return coeffs_.size(); }
    std::optional<int> exact_degree() const noexcept { return exact_degree_; }
    bool is_polynomial() const noexcept { return exact_degree_.has_value(); }

    const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
    cplx operator[](std::size_t k) const { return coeffs_[k]; }

    /// Index of the first nonzero coefficient, or truncation() if none.
    std::size_t valuation() const noexcept;
    /// One past the last nonzero coefficient.
    std::size_t support_end() const noexcept;

    /// Same function at a different truncation (zero padded when growing).
    PowerSeries resized(std::size_t n) const;

    PowerSeries operator+(const PowerSeries& o) const;
    PowerSeries operator-(const PowerSeries& o) const;
    PowerSeries operator*(cplx c) const;
    PowerSeries plus_constant(cplx c) const;

    double max_abs_coeff() const noexcept;
    double l1_norm() const noexcept;
    /// Squared l2 norm of the stored coefficients (H^2 norm of the truncation).
    double energy() const noexcept;

private:
    std::vector<cplx> coeffs_;
    std::optional<int> exact_degree_;
};

struct SeriesValue {
    cplx value;
    /// Upper bound on the dropped tail when a sup-norm bound was supplied,
    /// otherwise NaN.
    double tail_bound;
};

/// Horner evaluation; rejects |z| >= 1.
cplx evaluate(const PowerSeries& s, cplx z);

/// Evaluation with the Cauchy-estimate tail bound
/// sup_bound * |z|^N / (1 - |z|), valid when |f| <= sup_bound on the disc.
SeriesValue evaluate_with_tail(const PowerSeries& s, cplx z, double sup_bound);

/// Evaluation of the polynomial formed by the stored coefficients, with no
/// disc restriction. Used for points on or past the unit circle when the
/// series is known to be a polynomial.
cplx evaluate_polynomial(const PowerSeries& s, cplx z);

/// Derivative of the truncated series (coefficients (k+1) a_{k+1}).
PowerSeries derivative(const PowerSeries& s);

/// Cauchy product truncated to the common length.
PowerSeries multiply(const PowerSeries& s, const PowerSeries& t);

PowerSeries power(const PowerSeries& s, unsigned n);

/// Reciprocal 1/s; requires s[0] != 0.
PowerSeries reciprocal(const PowerSeries& s);
PowerSeries divide(const PowerSeries& s, const PowerSeries& t);

/// exp(s) with the constant term handled as exp(s0) * exp(s - s0).
PowerSeries series_exp(const PowerSeries& s);
/// Principal-branch log(s) at s[0]; requires s[0] != 0.
PowerSeries series_log(const PowerSeries& s);
/// Principal-branch sqrt(s) at s[0]; requires s[0] != 0.
PowerSeries series_sqrt(const PowerSeries& s);

/// Formal composition outer(inner) when inner[0] == 0. Exact in every
/// retained coefficient (coefficient k only sees outer[0..k], inner[1..k]).
PowerSeries compose_formal(const PowerSeries& outer, const PowerSeries& inner);

/// Taylor coefficients at c of the function given by the truncated series.
/// The neglected tail is bounded by sup_bound * rho(c) where the caller gets
/// the bound through `tail_bound` (NaN when no sup bound is known).
PowerSeries recentre(const PowerSeries& s, cplx c, double sup_bound, double* tail_bound);

/// outer(inner) for two series. When inner(0) == 0 this is compose_formal.
/// Otherwise inner must be certified as a self-map by the caller
/// (`inner_is_self_map`), and outer is recentred at inner(0) through its
/// series; the reported tail covers the recentring truncation.
PowerSeries compose(const PowerSeries& outer, const PowerSeries& inner,
                    bool inner_is_self_map = false, double* tail_bound = nullptr);

/// Compositional inverse r with s(r(z)) = z; needs s[0] == 0, s[1] != 0.
/// Lagrange inversion: r_n = (1/n) [w^{n-1}] (w / s(w))^n.
PowerSeries reversion(const PowerSeries& s);

/// Largest coefficient difference on indices [0, upto).
double max_coeff_diff(const PowerSeries& a, const PowerSeries& b, std::size_t upto);
double max_coeff_diff(const PowerSeries& a, const PowerSeries& b);

}  // namespace hardylab
