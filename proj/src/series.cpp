#include "hardylab/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hardylab {

namespace {

void require_same_truncation(const PowerSeries& a, const PowerSeries& b, const char* op) {
    if (a.truncation() != b.truncation()) {
        throw MathError("truncation-mismatch", std::string(op) + ": truncation mismatch (" +
                                                   std::to_string(a.truncation()) + " vs " +
                                                   std::to_string(b.truncation()) + ")");
    }
}

std::optional<int> add_degrees(std::optional<int> a, std::optional<int> b) {
    if (a && b) return std::max(*a, *b);
    return std::nullopt;
}

}  // namespace

PowerSeries::PowerSeries(std::vector<cplx> coeffs, std::optional<int> exact_degree)
    : coeffs_(std::move(coeffs)), exact_degree_(exact_degree) {
    if (coeffs_.empty()) throw std::invalid_argument("PowerSeries: truncation must be >= 1");
    if (exact_degree_) {
        if (*exact_degree_ < 0) exact_degree_ = 0;
        for (std::size_t k = static_cast<std::size_t>(*exact_degree_) + 1; k < coeffs_.size(); ++k)
            coeffs_[k] = 0.0;
    }
}

PowerSeries PowerSeries::zero(std::size_t n) { return PowerSeries(std::vector<cplx>(n), 0); }

PowerSeries PowerSeries::constant(cplx c, std::size_t n) {
    std::vector<cplx> v(n);
    v[0] = c;
    return PowerSeries(std::move(v), 0);
}

PowerSeries PowerSeries::identity(std::size_t n) {
    std::vector<cplx> v(n);
    if (n > 1) v[1] = 1.0;
    return PowerSeries(std::move(v), 1);
}

PowerSeries PowerSeries::polynomial(std::span<const cplx> coeffs, std::size_t n) {
    std::vector<cplx> v(n);
    int deg = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] != cplx{}) deg = static_cast<int>(k);
        if (k < n) v[k] = coeffs[k];
    }
    return PowerSeries(std::move(v), deg);
}

std::size_t PowerSeries::valuation() const noexcept {
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
        if (coeffs_[k] != cplx{}) return k;
    return coeffs_.size();
}

std::size_t PowerSeries::support_end() const noexcept {
    std::size_t end = coeffs_.size();
    while (end > 0 && coeffs_[end - 1] == cplx{}) --end;
    return end;
}

PowerSeries PowerSeries::resized(std::size_t n) const {
    std::vector<cplx> v(n);
    std::copy_n(coeffs_.begin(), std::min(n, coeffs_.size()), v.begin());
    if (n > coeffs_.size() && !exact_degree_) {
        // growing an infinite series would fabricate zeros
        throw std::invalid_argument("PowerSeries::resized: cannot extend a non-polynomial series");
    }
    return PowerSeries(std::move(v), exact_degree_);
}

PowerSeries PowerSeries::operator+(const PowerSeries& o) const {
    require_same_truncation(*this, o, "add");
    std::vector<cplx> v(coeffs_);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.coeffs_[k];
    return PowerSeries(std::move(v), add_degrees(exact_degree_, o.exact_degree_));
}

PowerSeries PowerSeries::operator-(const PowerSeries& o) const { return *this + o * cplx{-1.0}; }

PowerSeries PowerSeries::operator*(cplx c) const {
    std::vector<cplx> v(coeffs_);
    for (auto& x : v) x *= c;
    return PowerSeries(std::move(v), exact_degree_);
}

PowerSeries PowerSeries::plus_constant(cplx c) const {
    std::vector<cplx> v(coeffs_);
    v[0] += c;
    return PowerSeries(std::move(v), exact_degree_);
}

double PowerSeries::max_abs_coeff() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double PowerSeries::l1_norm() const noexcept {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::abs(c);
    return s;
}

double PowerSeries::energy() const noexcept {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return s;
}

cplx evaluate_polynomial(const PowerSeries& s, cplx z) {
    cplx acc{};
    const auto& c = s.coeffs();
    for (std::size_t k = s.support_end(); k-- > 0;) acc = acc * z + c[k];
    return acc;
}

cplx evaluate(const PowerSeries& s, cplx z) {
    if (!(std::abs(z) < 1.0))
        throw MathError("outside-disc", "evaluate: |z| must be < 1");
    return evaluate_polynomial(s, z);
}

SeriesValue evaluate_with_tail(const PowerSeries& s, cplx z, double sup_bound) {
    const cplx v = evaluate(s, z);
    if (s.is_polynomial() && static_cast<std::size_t>(*s.exact_degree()) < s.truncation())
        return {v, 0.0};
    if (!std::isfinite(sup_bound)) return {v, std::numeric_limits<double>::quiet_NaN()};
    const double r = std::abs(z);
    return {v, sup_bound * std::pow(r, static_cast<double>(s.truncation())) / (1.0 - r)};
}

PowerSeries derivative(const PowerSeries& s) {
    const std::size_t n = s.truncation();
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k + 1 < n; ++k) v[k] = static_cast<double>(k + 1) * s[k + 1];
    std::optional<int> deg;
    if (s.exact_degree()) deg = std::max(0, *s.exact_degree() - 1);
    return PowerSeries(std::move(v), deg);
}

PowerSeries multiply(const PowerSeries& s, const PowerSeries& t) {
    require_same_truncation(s, t, "multiply");
    const std::size_t n = s.truncation();
    std::vector<cplx> out(n);
    const std::size_t s0 = s.valuation(), s1 = s.support_end();
    const std::size_t t0 = t.valuation(), t1 = t.support_end();
    const auto& a = s.coeffs();
    const auto& b = t.coeffs();
    for (std::size_t i = s0; i < s1; ++i) {
        const cplx ai = a[i];
        if (ai == cplx{}) continue;
        const std::size_t jmax = std::min(t1, n - i);
        for (std::size_t j = t0; j < jmax; ++j) out[i + j] += ai * b[j];
    }
    std::optional<int> deg;
    if (s.exact_degree() && t.exact_degree()) deg = *s.exact_degree() + *t.exact_degree();
    return PowerSeries(std::move(out), deg);
}

PowerSeries power(const PowerSeries& s, unsigned n) {
    PowerSeries result = PowerSeries::constant(1.0, s.truncation());
    PowerSeries base = s;
    while (n) {
        if (n & 1u) result = multiply(result, base);
        n >>= 1u;
        if (n) base = multiply(base, base);
    }
    return result;
}

PowerSeries reciprocal(const PowerSeries& s) {
    const std::size_t n = s.truncation();
    if (s[0] == cplx{}) throw MathError("not-invertible", "reciprocal: constant term is zero");
    std::vector<cplx> r(n);
    const auto& a = s.coeffs();
    const std::size_t end = s.support_end();
    r[0] = 1.0 / a[0];
    for (std::size_t k = 1; k < n; ++k) {
        cplx acc{};
        const std::size_t jmax = std::min(k, end - 1);
        for (std::size_t j = 1; j <= jmax; ++j) acc += a[j] * r[k - j];
        r[k] = -acc * r[0];
    }
    std::optional<int> deg;
    if (s.exact_degree() && *s.exact_degree() == 0) deg = 0;
    return PowerSeries(std::move(r), deg);
}

PowerSeries divide(const PowerSeries& s, const PowerSeries& t) {
    require_same_truncation(s, t, "divide");
    return multiply(s, reciprocal(t));
}

PowerSeries series_exp(const PowerSeries& s) {
    // E' = s' E  =>  k e_k = sum_{j=1..k} j s_j e_{k-j}
    const std::size_t n = s.truncation();
    const auto& a = s.coeffs();
    const std::size_t end = s.support_end();
    std::vector<cplx> e(n);
    e[0] = std::exp(a[0]);
    for (std::size_t k = 1; k < n; ++k) {
        cplx acc{};
        const std::size_t jmax = std::min(k, end == 0 ? 0 : end - 1);
        for (std::size_t j = 1; j <= jmax; ++j) acc += static_cast<double>(j) * a[j] * e[k - j];
        e[k] = acc / static_cast<double>(k);
    }
    std::optional<int> deg;
    if (s.exact_degree() && *s.exact_degree() == 0) deg = 0;
    return PowerSeries(std::move(e), deg);
}

PowerSeries series_log(const PowerSeries& s) {
    if (s[0] == cplx{}) throw MathError("log-of-zero", "series_log: constant term is zero");
    // L' = s'/s
    const std::size_t n = s.truncation();
    const PowerSeries q = divide(derivative(s), s);
    std::vector<cplx> l(n);
    l[0] = std::log(s[0]);
    for (std::size_t k = 1; k < n; ++k) l[k] = q[k - 1] / static_cast<double>(k);
    std::optional<int> deg;
    if (s.exact_degree() && *s.exact_degree() == 0) deg = 0;
    return PowerSeries(std::move(l), deg);
}

PowerSeries series_sqrt(const PowerSeries& s) {
    if (s[0] == cplx{}) throw MathError("sqrt-of-zero", "series_sqrt: constant term is zero");
    // g^2 = s  =>  2 g_0 g_k = s_k - sum_{j=1..k-1} g_j g_{k-j}
    const std::size_t n = s.truncation();
    std::vector<cplx> g(n);
    g[0] = std::sqrt(s[0]);
    const cplx inv2g0 = 1.0 / (2.0 * g[0]);
    for (std::size_t k = 1; k < n; ++k) {
        cplx acc = s[k];
        for (std::size_t j = 1; j < k; ++j) acc -= g[j] * g[k - j];
        g[k] = acc * inv2g0;
    }
    std::optional<int> deg;
    if (s.exact_degree() && *s.exact_degree() == 0) deg = 0;
    return PowerSeries(std::move(g), deg);
}

namespace {

PowerSeries horner_compose(const PowerSeries& outer, const PowerSeries& inner) {
    const std::size_t n = inner.truncation();
    const std::size_t top = outer.support_end();
    PowerSeries acc = PowerSeries::zero(n);
    for (std::size_t k = top; k-- > 0;) acc = multiply(acc, inner).plus_constant(outer[k]);
    std::optional<int> deg;
    if (outer.exact_degree() && inner.exact_degree())
        deg = std::max(0, *outer.exact_degree()) * std::max(0, *inner.exact_degree());
    return PowerSeries(acc.coeffs(), deg);
}

}  // namespace

PowerSeries compose_formal(const PowerSeries& outer, const PowerSeries& inner) {
    require_same_truncation(outer, inner, "compose");
    if (inner[0] != cplx{})
        throw MathError("not-formal", "compose_formal: inner(0) must be 0");
    return horner_compose(outer, inner);
}

PowerSeries recentre(const PowerSeries& s, cplx c, double sup_bound, double* tail_bound) {
    const std::size_t n = s.truncation();
    const double x = std::abs(c);
    if (!(x < 1.0)) throw MathError("outside-disc", "recentre: |c| must be < 1");
    const auto& a = s.coeffs();
    const std::size_t end = s.support_end();
    std::vector<cplx> b(n);
    // b_j = sum_{k>=j} a_k C(k,j) c^{k-j}; synthetic division repeated n times
    std::vector<cplx> work(a.begin(), a.begin() + end);
    for (std::size_t j = 0; j < n && !work.empty(); ++j) {
        // evaluate work at c and divide by (t - c)
        const std::size_t m = work.size();
        std::vector<cplx> quotient(m > 0 ? m - 1 : 0);
        cplx acc{};
        for (std::size_t k = m; k-- > 0;) {
            acc = acc * c + work[k];
            if (k > 0) quotient[k - 1] = acc;
        }
        b[j] = acc;
        work = std::move(quotient);
    }
    const bool finite = s.is_polynomial() && static_cast<std::size_t>(*s.exact_degree()) < n;
    if (tail_bound) {
        if (finite) {
            *tail_bound = 0.0;
        } else if (!std::isfinite(sup_bound)) {
            *tail_bound = std::numeric_limits<double>::quiet_NaN();
        } else {
            // |a_k| <= sup_bound; worst coefficient j of sum_{k>=N} C(k,j) x^{k-j}
            double worst = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double term = 1.0;  // C(N, j) x^{N-j}, built in log space
                const double lt = std::lgamma(double(n) + 1) - std::lgamma(double(j) + 1) -
                                  std::lgamma(double(n - j) + 1) + double(n - j) * std::log(x);
                term = std::exp(lt);
                double sum = 0.0;
                for (std::size_t k = n; k < n + 200000; ++k) {
                    sum += term;
                    term *= double(k + 1) / double(k + 1 - j) * x;
                    if (term < 1e-18 * sum || !std::isfinite(sum)) break;
                }
                worst = std::max(worst, sum);
            }
            *tail_bound = sup_bound * worst;
        }
    }
    return PowerSeries(std::move(b), finite ? s.exact_degree() : std::nullopt);
}

PowerSeries compose(const PowerSeries& outer, const PowerSeries& inner, bool inner_is_self_map,
                    double* tail_bound) {
    require_same_truncation(outer, inner, "compose");
    if (tail_bound) *tail_bound = 0.0;
    if (inner[0] == cplx{}) return horner_compose(outer, inner);
    if (outer.is_polynomial() &&
        static_cast<std::size_t>(*outer.exact_degree()) < outer.truncation()) {
        // finite outer: Horner is exact regardless of inner(0)
        return horner_compose(outer, inner);
    }
    if (!inner_is_self_map) {
        throw MathError("not-self-map",
                        "compose: inner(0) != 0 and inner is not certified as a self-map; "
                        "supply a closed-form outer or certify inner first");
    }
    const cplx c = inner[0];
    const PowerSeries shifted = recentre(outer, c, outer.l1_norm(), tail_bound);
    return horner_compose(shifted, inner.plus_constant(-c));
}

PowerSeries reversion(const PowerSeries& s) {
    const std::size_t n = s.truncation();
    if (s[0] != cplx{}) throw MathError("not-centred", "reversion: s(0) must be 0");
    if (n < 2 || s[1] == cplx{})
        throw MathError("critical-point",
                        "reversion: s'(0) = 0 (critical point, no single-valued local inverse)");
    // q(w) = w / s(w) = 1 / (s_1 + s_2 w + ...)
    std::vector<cplx> shifted(n);
    for (std::size_t k = 0; k + 1 < n; ++k) shifted[k] = s[k + 1];
    const PowerSeries q = reciprocal(PowerSeries(std::move(shifted), std::nullopt));
    std::vector<cplx> r(n);
    PowerSeries qp = PowerSeries::constant(1.0, n);
    for (std::size_t k = 1; k < n; ++k) {
        qp = multiply(qp, q);
        r[k] = qp[k - 1] / static_cast<double>(k);
    }
    std::optional<int> deg;
    if (s.exact_degree() && *s.exact_degree() == 1) deg = 1;
    return PowerSeries(std::move(r), deg);
}

double max_coeff_diff(const PowerSeries& a, const PowerSeries& b, std::size_t upto) {
    upto = std::min({upto, a.truncation(), b.truncation()});
    double m = 0.0;
    for (std::size_t k = 0; k < upto; ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double max_coeff_diff(const PowerSeries& a, const PowerSeries& b) {
    return max_coeff_diff(a, b, std::max(a.truncation(), b.truncation()));
}

}  // namespace hardylab
