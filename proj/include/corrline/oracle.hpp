#pragma once

// Reference implementations used only to cross-check the fast paths:
// exhaustive enumerations, exact integer combinatorics, and direct
// summations. Deliberately simple and independent of the algorithms they
// verify; used by the test suites and by the `verify` command.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "corrline/errors.hpp"
#include "corrline/interval.hpp"
#include "corrline/learn.hpp"
#include "corrline/stats.hpp"
#include "corrline/walk.hpp"

namespace corrline::oracle {

// Exact binomial coefficient by Pascal's rule; n up to 62 stays within
// uint64 range.
inline std::uint64_t binomial_exact(int n, int k) {
    if (n < 0 || k < 0 || k > n || n > 62) throw DomainError("binomial_exact: out of range");
    std::vector<std::uint64_t> row(n + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = i; j >= 1; --j) row[j] += row[j - 1];
    return row[k];
}

inline double catalan_exact(int n) {
    return static_cast<double>(binomial_exact(2 * n, n)) / static_cast<double>(n + 1);
}

// Exact binomial CDF P(X <= k) for X ~ B(n, p) by direct summation.
inline double binom_cdf(int n, double p, int k) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    stats::KahanSum sum;
    for (int i = 0; i <= k; ++i) {
        sum += static_cast<double>(binomial_exact(n, i)) * std::pow(p, i) *
               std::pow(1.0 - p, n - i);
    }
    return std::min(1.0, sum.value());
}

inline double binom_upper_tail(int n, double p, int k) { return 1.0 - binom_cdf(n, p, k - 1); }

// Kullback-Leibler divergence between two-outcome distributions, summed
// outcome by outcome (numerical cross-check of the closed entropy form).
inline double kl_two_outcome(double x, double y) {
    return x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
}

// Brute-force optimal-set summary over all O(n^2) intervals.
inline interval::OptimalSetSummary brute_summary(const interval::CorruptedSignal& signal,
                                                 std::optional<interval::Interval> reference) {
    const std::int64_t n = signal.n();
    std::vector<std::int64_t> prefix(n + 1, 0);
    for (std::int64_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + signal.values[i];

    interval::OptimalSetSummary out;
    out.max_score = std::numeric_limits<std::int64_t>::min();
    for (std::int64_t s = 1; s <= n; ++s)
        for (std::int64_t e = s; e <= n; ++e)
            out.max_score = std::max(out.max_score, prefix[e] - prefix[s - 1]);

    std::int64_t max_sym = -1, max_overlap_sym = -1;
    bool phantom = false;
    std::optional<interval::IntervalCandidate> phantom_witness;
    for (std::int64_t s = 1; s <= n; ++s) {
        for (std::int64_t e = s; e <= n; ++e) {
            if (prefix[e] - prefix[s - 1] != out.max_score) continue;
            ++out.count;
            if (out.witness_examples.size() < interval::kMaxWitnesses)
                out.witness_examples.push_back(
                    interval::IntervalCandidate{{s, e}, out.max_score});
            if (reference) {
                const interval::Interval trial{s, e};
                const std::int64_t sym = reference->sym_diff(trial);
                max_sym = std::max(max_sym, sym);
                if (reference->overlap(trial) > 0)
                    max_overlap_sym = std::max(max_overlap_sym, sym);
                else if (!phantom) {
                    phantom = true;
                    phantom_witness = interval::IntervalCandidate{trial, out.max_score};
                }
            }
        }
    }
    if (reference) {
        out.max_sym_diff = max_sym;
        out.max_overlap_sym_diff =
            max_overlap_sym >= 0 ? std::optional<std::int64_t>(max_overlap_sym) : std::nullopt;
        out.phantom_exists = phantom;
        out.phantom_witness = phantom_witness;
    }
    return out;
}

// Exhaustive threshold ERM: recount the mistakes of every cut directly.
inline std::int64_t brute_threshold_mistakes(const learn::NoisySample& sample) {
    const std::int64_t m = sample.size();
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t k = 0; k <= m; ++k) {
        std::int64_t mistakes = 0;
        for (std::int64_t i = 0; i < m; ++i) {
            const int predicted = i >= k ? 1 : -1;
            mistakes += predicted != sample.labels[i] ? 1 : 0;
        }
        best = std::min(best, mistakes);
    }
    return best;
}

// Exhaustive interval ERM over all runs plus the empty hypothesis.
inline std::int64_t brute_interval_mistakes(const learn::NoisySample& sample) {
    const std::int64_t m = sample.size();
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t i = 0; i <= m; ++i) {      // i == 0: empty prediction
        for (std::int64_t j = i; j <= m; ++j) {  // run covers points i..j (1-based), empty if i==0
            std::int64_t mistakes = 0;
            for (std::int64_t t = 1; t <= m; ++t) {
                const bool inside = i >= 1 && t >= i && t <= j;
                const int predicted = inside ? 1 : -1;
                mistakes += predicted != sample.labels[t - 1] ? 1 : 0;
            }
            best = std::min(best, mistakes);
            if (i == 0) break;  // single empty hypothesis
        }
    }
    return best;
}

// E[e^{sT}] from the dynamic-programming distribution, truncated where the
// weighted tail provably drops below tail_tol.
inline double mgf_from_dp(const walk::BiasParams& params, double s, double tail_tol = 1e-12) {
    const double growth = std::exp(s) * std::sqrt(params.four_pq());
    if (!(growth < 1.0)) throw DomainError("mgf_from_dp: weighted tail does not converge");
    // sum_{k>K} e^{sk} P(T=k) <= (1+sqrt2) sum_{k>K} (e^s sqrt(4pq))^k
    std::int64_t t_max = 64;
    const double log_growth = std::log(growth);
    while ((1.0 + walk::kSqrt2) * std::exp(static_cast<double>(t_max + 1) * log_growth) /
               (1.0 - growth) >
           tail_tol)
        t_max *= 2;
    const walk::DpTail dp = walk::tail_dp_oracle(params, t_max);
    stats::KahanSum sum;
    for (std::int64_t k = 0; k <= t_max; ++k)
        sum += std::exp(s * static_cast<double>(k)) * dp.pmf[k];
    return sum.value();
}

// Mean and second moment of T from the dynamic program, truncated where the
// polynomially weighted tail is provably below tail_tol.
struct DpMoments {
    double mean = 0.0;
    double second_moment = 0.0;
};

inline DpMoments dp_moments(const walk::BiasParams& params, double tail_tol = 1e-10) {
    const double r = std::sqrt(params.four_pq());
    std::int64_t t_max = 64;
    while ((1.0 + walk::kSqrt2) * std::pow(static_cast<double>(t_max), 3.0) *
               std::pow(r, static_cast<double>(t_max)) / (1.0 - r) >
           tail_tol)
        t_max *= 2;
    const walk::DpTail dp = walk::tail_dp_oracle(params, t_max);
    stats::KahanSum mean, second;
    for (std::int64_t k = 0; k <= t_max; ++k) {
        const double kd = static_cast<double>(k);
        mean += kd * dp.pmf[k];
        second += kd * kd * dp.pmf[k];
    }
    return DpMoments{mean.value(), second.value()};
}

}  // namespace corrline::oracle
