#pragma once

// Special-function and information-theoretic primitives shared by the other
// modules: Catalan numbers, Pochhammer symbols, the Gauss hypergeometric
// series 2F1, the Lerch transcendent Phi, Bernoulli relative entropy, and
// Chernoff/Stirling binomial tail bounds.
//
// All series are evaluated by their defining power series on |x| < 1 with a
// rigorous geometric bound on the discarded tail; there is no analytic
// continuation here and none is needed by the callers.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "corrline/errors.hpp"
#include "corrline/stats.hpp"

namespace corrline::specfn {

inline constexpr double kDefaultTol = 1e-12;
inline constexpr std::int64_t kSeriesTermCap = 10'000'000;

// Value of a truncated series together with a bound on the truncation error.
struct SeriesValue {
    double value = 0.0;
    double truncation_bound = 0.0;  // bound on |true - value| from cutting the tail
    std::int64_t terms_used = 0;
};

// Series did not meet the tolerance within the term cap. The partial sum and
// its (still valid) tail bound are attached so callers can decide what to do.
struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& what, SeriesValue partial_)
        : std::runtime_error(what), partial(partial_) {}
    SeriesValue partial;
};

// ln C_n via log-gamma; exact enough for n up to 1e6.
inline double log_catalan(std::int64_t n) {
    if (n < 0) throw DomainError("log_catalan: n must be >= 0");
    const double nd = static_cast<double>(n);
    return std::lgamma(2.0 * nd + 1.0) - 2.0 * std::lgamma(nd + 1.0) - std::log(nd + 1.0);
}

// C_n = binom(2n, n) / (n + 1)
inline double catalan(std::int64_t n) {
    const double ln_c = log_catalan(n);
    if (ln_c >= std::log(std::numeric_limits<double>::max()))
        throw std::overflow_error("catalan: value exceeds double range, use log_catalan");
    return std::exp(ln_c);
}

// Rising factorial (alpha)_n = alpha (alpha+1) ... (alpha+n-1), (alpha)_0 = 1.
inline double pochhammer(double alpha, std::int64_t n) {
    if (n < 0) throw DomainError("pochhammer: n must be >= 0");
    double prod = 1.0;
    for (std::int64_t k = 0; k < n; ++k) prod *= alpha + static_cast<double>(k);
    return prod;
}

namespace detail {

// Shared series driver. `ratio(m)` maps term t_m to t_{m+1}; `ratio_sup(m)`
// must upper bound |ratio(j)| for every j >= m. Once ratio_sup < 1 the
// discarded tail is at most |t_m| * r / (1 - r).
template <typename Ratio, typename RatioSup>
SeriesValue sum_series(double first_term, Ratio ratio, RatioSup ratio_sup, double tol,
                       const char* name) {
    if (!(tol > 0.0)) throw DomainError(std::string(name) + ": tol must be > 0");
    stats::KahanSum sum(first_term);
    double term = first_term;
    for (std::int64_t m = 0; m < kSeriesTermCap; ++m) {
        const double rsup = ratio_sup(m);
        if (rsup < 1.0) {
            const double tail = std::abs(term) * rsup / (1.0 - rsup);
            if (tail <= tol) return {sum.value(), tail, m + 1};
        }
        term *= ratio(m);
        sum += term;
    }
    const double rsup = ratio_sup(kSeriesTermCap);
    const double tail = rsup < 1.0 ? std::abs(term) * rsup / (1.0 - rsup)
                                   : std::numeric_limits<double>::infinity();
    throw NonConvergence(std::string(name) + ": term cap reached before tolerance",
                         SeriesValue{sum.value(), tail, kSeriesTermCap});
}

}  // namespace detail

// Gauss hypergeometric series 2F1(a, b; c; x) = sum (a)_n (b)_n / (c)_n x^n / n!,
// valid for |x| < 1 and c not a nonpositive integer.
inline SeriesValue hyp2f1(double a, double b, double c, double x, double tol = kDefaultTol) {
    if (!(std::abs(x) < 1.0)) throw DomainError("hyp2f1: requires |x| < 1");
    if (c <= 0.0 && c == std::floor(c)) throw DomainError("hyp2f1: c must not be a nonpositive integer");
    const double ax = std::abs(x);
    auto ratio = [=](std::int64_t m) {
        const double md = static_cast<double>(m);
        return (a + md) * (b + md) / ((c + md) * (1.0 + md)) * x;
    };
    // |t_{j+1}/t_j| = |x| (a+j)/(1+j) * (b+j)/(c+j); both fractions move
    // monotonically toward 1 as j grows, so taking max(1, .) at j = m bounds
    // every later ratio. Only claim a bound once all shifted factors are > 0.
    auto ratio_sup = [=](std::int64_t m) {
        const double md = static_cast<double>(m);
        if (a + md <= 0.0 || b + md <= 0.0 || c + md <= 0.0)
            return std::numeric_limits<double>::infinity();
        const double u = std::max(1.0, (a + md) / (1.0 + md));
        const double v = std::max(1.0, (b + md) / (c + md));
        return ax * u * v;
    };
    return detail::sum_series(1.0, ratio, ratio_sup, tol, "hyp2f1");
}

// Lerch transcendent Phi(z, s, a) = sum_{n>=0} z^n / (n + a)^s, |z| < 1, a > 0.
inline SeriesValue lerch_phi(double z, double s, double a, double tol = kDefaultTol) {
    if (!(std::abs(z) < 1.0)) throw DomainError("lerch_phi: requires |z| < 1");
    if (!(a > 0.0)) throw DomainError("lerch_phi: requires a > 0");
    const double az = std::abs(z);
    auto ratio = [=](std::int64_t m) {
        const double md = static_cast<double>(m);
        return z * std::pow((md + a) / (md + 1.0 + a), s);
    };
    // ((m+a)/(m+1+a))^s is < 1 for s >= 0 and decreases toward 1 from above
    // for s < 0, so the current value bounds all later ones.
    auto ratio_sup = [=](std::int64_t m) {
        if (s >= 0.0) return az;
        const double md = static_cast<double>(m);
        return az * std::pow((md + a) / (md + 1.0 + a), s);
    };
    const double first = std::pow(a, -s);
    return detail::sum_series(first, ratio, ratio_sup, tol, "lerch_phi");
}

// Arguments of D(x || y); both must lie strictly inside (0, 1).
struct EntropyPair {
    double x;
    double y;
    EntropyPair(double x_, double y_) : x(x_), y(y_) {
        if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0))
            throw DomainError("EntropyPair: arguments must lie in (0, 1)");
    }
};

// Relative entropy (natural log) between Bernoulli(x) and Bernoulli(y):
//   D(x || y) = x ln(x/y) + (1 - x) ln((1-x)/(1-y))
inline double rel_entropy(const EntropyPair& pair) {
    const double x = pair.x, y = pair.y;
    return x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
}

inline double rel_entropy(double x, double y) { return rel_entropy(EntropyPair(x, y)); }

// Chernoff-Hoeffding upper bound on the lower binomial tail:
//   P(X <= k) <= exp(-n D(k/n || p))  for X ~ B(n, p), 0 < k/n < p.
inline double binom_tail_upper(std::int64_t n_trials, double p_success, std::int64_t k) {
    if (n_trials <= 0) throw DomainError("binom_tail_upper: n_trials must be positive");
    if (!(p_success > 0.0 && p_success < 1.0))
        throw DomainError("binom_tail_upper: p_success must lie in (0, 1)");
    const double frac = static_cast<double>(k) / static_cast<double>(n_trials);
    if (!(frac > 0.0 && frac < p_success))
        throw DomainError("binom_tail_upper: requires 0 < k/n < p");
    return std::exp(-static_cast<double>(n_trials) * rel_entropy(frac, p_success));
}

// Stirling-based lower bound on the upper binomial tail:
//   P(X >= k) >= exp(-n D(k/n || p)) / sqrt(2n)  for p < k/n < 1.
inline double binom_tail_lower(std::int64_t n_trials, double p_success, std::int64_t k) {
    if (n_trials <= 0) throw DomainError("binom_tail_lower: n_trials must be positive");
    if (!(p_success > 0.0 && p_success < 1.0))
        throw DomainError("binom_tail_lower: p_success must lie in (0, 1)");
    const double frac = static_cast<double>(k) / static_cast<double>(n_trials);
    if (!(frac > p_success && frac < 1.0))
        throw DomainError("binom_tail_lower: requires p < k/n < 1");
    const double n = static_cast<double>(n_trials);
    return std::exp(-n * rel_entropy(frac, p_success)) / std::sqrt(2.0 * n);
}

}  // namespace corrline::specfn
