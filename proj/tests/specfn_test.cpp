#include "corrline/specfn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "corrline/oracle.hpp"
#include "corrline/stats.hpp"

namespace specfn = corrline::specfn;
namespace oracle = corrline::oracle;
using corrline::DomainError;

TEST(Catalan, SmallValues) {
    EXPECT_DOUBLE_EQ(specfn::catalan(0), 1.0);
    EXPECT_DOUBLE_EQ(specfn::catalan(1), 1.0);
    EXPECT_NEAR(specfn::catalan(3), 5.0, 1e-12);
}

TEST(Catalan, MatchesExactBinomialOracle) {
    for (int n = 0; n <= 30; ++n) {
        const double exact = oracle::catalan_exact(n);
        EXPECT_NEAR(specfn::catalan(n) / exact, 1.0, 1e-12) << "n=" << n;
    }
}

TEST(Catalan, LogFormAccurateAtMillion) {
    // ln binom(2n, n) = sum_k ln((n+k)/k), summed directly with compensation
    const std::int64_t n = 1'000'000;
    corrline::stats::KahanSum log_binom;
    for (std::int64_t k = 1; k <= n; ++k)
        log_binom += std::log(static_cast<double>(n + k) / static_cast<double>(k));
    const double expected = log_binom.value() - std::log(static_cast<double>(n + 1));
    EXPECT_NEAR(specfn::log_catalan(n) / expected, 1.0, 1e-12);
}

TEST(Catalan, LinearFormOverflows) {
    EXPECT_THROW(specfn::catalan(600), std::overflow_error);
    EXPECT_NO_THROW(specfn::log_catalan(600));
}

TEST(Catalan, RatioIdentity) {
    // C_n = C_k (k+1/2)_{n-k} / (k+2)_{n-k} 4^{n-k} for 0 <= k < n
    for (int n = 1; n <= 25; ++n) {
        for (int k = 0; k < n; ++k) {
            const double lhs = specfn::catalan(n);
            const double rhs = specfn::catalan(k) * specfn::pochhammer(k + 0.5, n - k) /
                               specfn::pochhammer(k + 2.0, n - k) *
                               std::pow(4.0, static_cast<double>(n - k));
            EXPECT_NEAR(lhs / rhs, 1.0, 1e-12) << "n=" << n << " k=" << k;
        }
    }
}

TEST(Pochhammer, Basics) {
    EXPECT_DOUBLE_EQ(specfn::pochhammer(2.5, 0), 1.0);
    EXPECT_DOUBLE_EQ(specfn::pochhammer(1.0, 4), 24.0);
    EXPECT_DOUBLE_EQ(specfn::pochhammer(0.5, 3), 0.5 * 1.5 * 2.5);
    EXPECT_THROW(specfn::pochhammer(1.0, -1), DomainError);
}

TEST(Hyp2f1, TrivialPoints) {
    const auto at_zero = specfn::hyp2f1(1.0, 0.5, 2.0, 0.0);
    EXPECT_DOUBLE_EQ(at_zero.value, 1.0);
    EXPECT_DOUBLE_EQ(at_zero.truncation_bound, 0.0);
    // 2F1(1,1;1;x) = 1/(1-x)
    EXPECT_NEAR(specfn::hyp2f1(1.0, 1.0, 1.0, 0.5).value, 2.0, 1e-12);
}

TEST(Hyp2f1, UnitAtZeroForManyParameters) {
    for (double a : {0.5, 1.0, 2.0, 7.5})
        for (double b : {0.25, 1.5, 3.0})
            for (double c : {0.5, 2.0, 9.0})
                EXPECT_DOUBLE_EQ(specfn::hyp2f1(a, b, c, 0.0).value, 1.0);
}

TEST(Hyp2f1, MatchesCatalanTailSum) {
    // sum_{m>=k} C_m x^m = x^k C_k 2F1(1, k+1/2; k+2; 4x); at k=3, x=pq with
    // p=0.75 the right side is 2F1(1, 3.5; 5; 0.75) and the left side divided
    // by x^3 C_3 is sum_n C_{3+n} x^n / C_3.
    const double x = 0.75 * 0.25;
    corrline::stats::KahanSum sum;
    for (int n = 0; n <= 400; ++n)
        sum += std::exp(specfn::log_catalan(3 + n) + n * std::log(x)) / specfn::catalan(3);
    const auto f = specfn::hyp2f1(1.0, 3.5, 5.0, 4.0 * x);
    EXPECT_NEAR(f.value, sum.value(), 1e-10);
}

TEST(Hyp2f1, PartialCatalanSumIdentity) {
    // sum_{n<k} C_n x^n = -x^k C_k 2F1(1, k+1/2; k+2; 4x) + (1-sqrt(1-4x))/(2x)
    for (int k = 1; k <= 20; ++k) {
        for (double x : {0.05, 0.1, 0.2}) {
            corrline::stats::KahanSum direct;
            for (int n = 0; n < k; ++n) direct += specfn::catalan(n) * std::pow(x, n);
            const double closed =
                -std::pow(x, k) * specfn::catalan(k) *
                    specfn::hyp2f1(1.0, k + 0.5, k + 2.0, 4.0 * x).value +
                (1.0 - std::sqrt(1.0 - 4.0 * x)) / (2.0 * x);
            EXPECT_NEAR(direct.value(), closed, 1e-10) << "k=" << k << " x=" << x;
        }
    }
}

TEST(Hyp2f1, TruncationBoundIsHonest) {
    const auto loose = specfn::hyp2f1(1.0, 5.5, 7.0, 0.8, 1e-6);
    const auto tight = specfn::hyp2f1(1.0, 5.5, 7.0, 0.8, 1e-14);
    EXPECT_LE(std::abs(loose.value - tight.value), loose.truncation_bound);
    EXPECT_LE(tight.terms_used, specfn::kSeriesTermCap);
    EXPECT_GE(loose.truncation_bound, 0.0);
}

TEST(Hyp2f1, DomainErrors) {
    EXPECT_THROW(specfn::hyp2f1(1.0, 1.0, 2.0, 1.0), DomainError);
    EXPECT_THROW(specfn::hyp2f1(1.0, 1.0, 2.0, -1.5), DomainError);
    EXPECT_THROW(specfn::hyp2f1(1.0, 1.0, 0.0, 0.5), DomainError);
    EXPECT_THROW(specfn::hyp2f1(1.0, 1.0, -3.0, 0.5), DomainError);
    EXPECT_THROW(specfn::hyp2f1(1.0, 1.0, 2.0, 0.5, 0.0), DomainError);
}

TEST(Hyp2f1, ReportsNonConvergenceWithPartialValue) {
    try {
        specfn::hyp2f1(1.0, 1.0, 2.0, 1.0 - 1e-9, 1e-12);
        FAIL() << "expected NonConvergence";
    } catch (const specfn::NonConvergence& e) {
        EXPECT_EQ(e.partial.terms_used, specfn::kSeriesTermCap);
        EXPECT_GT(e.partial.value, 1.0);
    }
}

TEST(LerchPhi, TrivialPoints) {
    EXPECT_NEAR(specfn::lerch_phi(0.0, 1.5, 4.0).value, std::pow(4.0, -1.5), 1e-15);
    EXPECT_NEAR(specfn::lerch_phi(0.5, 0.0, 1.0).value, 2.0, 1e-12);
}

TEST(LerchPhi, MatchesLongDirectSummation) {
    corrline::stats::KahanSum direct;
    for (std::int64_t n = 0; n < 1'000'000; ++n)
        direct += std::pow(0.75, static_cast<double>(n)) / std::pow(n + 2.0, 1.5);
    EXPECT_NEAR(specfn::lerch_phi(0.75, 1.5, 2.0).value, direct.value(), 1e-10);
}

TEST(LerchPhi, NegativeOrderStillBounded) {
    // s < 0 exercises the decreasing-ratio branch of the tail bound
    const auto loose = specfn::lerch_phi(0.6, -1.5, 2.0, 1e-6);
    const auto tight = specfn::lerch_phi(0.6, -1.5, 2.0, 1e-14);
    EXPECT_LE(std::abs(loose.value - tight.value), loose.truncation_bound);
}

TEST(LerchPhi, DomainErrors) {
    EXPECT_THROW(specfn::lerch_phi(1.0, 1.5, 2.0), DomainError);
    EXPECT_THROW(specfn::lerch_phi(0.5, 1.5, 0.0), DomainError);
    EXPECT_THROW(specfn::lerch_phi(0.5, 1.5, -2.0), DomainError);
}

TEST(RelEntropy, IdentityAndKnownValues) {
    EXPECT_DOUBLE_EQ(specfn::rel_entropy(0.3, 0.3), 0.0);
    EXPECT_NEAR(specfn::rel_entropy(0.5, 0.75), 0.5 * std::log(4.0 / 3.0), 1e-15);
    EXPECT_NEAR(specfn::rel_entropy(0.25, 0.75), 0.5 * std::log(3.0), 1e-15);
}

TEST(RelEntropy, MatchesTwoOutcomeKlOracle) {
    for (double x : {0.1, 0.25, 0.5, 0.9})
        for (double y : {0.2, 0.5, 0.75})
            EXPECT_NEAR(specfn::rel_entropy(x, y), oracle::kl_two_outcome(x, y), 1e-14);
}

TEST(RelEntropy, RejectsBoundary) {
    EXPECT_THROW(specfn::rel_entropy(0.0, 0.5), DomainError);
    EXPECT_THROW(specfn::rel_entropy(1.0, 0.5), DomainError);
    EXPECT_THROW(specfn::rel_entropy(0.5, 0.0), DomainError);
    EXPECT_THROW(specfn::rel_entropy(0.5, 1.0), DomainError);
}

TEST(RelEntropy, MonotoneAwayFromCenter) {
    for (double y0 : {0.3, 0.75}) {
        double prev = specfn::rel_entropy(y0 / 100.0, y0);
        for (int i = 2; i < 100; ++i) {
            const double x = y0 * i / 100.0;
            const double d = specfn::rel_entropy(x, y0);
            EXPECT_LT(d, prev) << "x=" << x << " y0=" << y0;
            prev = d;
        }
        prev = 0.0;
        for (int i = 1; i < 100; ++i) {
            const double x = y0 + (1.0 - y0) * i / 100.0;
            const double d = specfn::rel_entropy(x, y0);
            EXPECT_GT(d, prev) << "x=" << x << " y0=" << y0;
            prev = d;
        }
    }
}

TEST(BinomTailUpper, KnownValueAndDomination) {
    EXPECT_NEAR(specfn::binom_tail_upper(10, 0.75, 5),
                std::exp(-10.0 * specfn::rel_entropy(0.5, 0.75)), 1e-15);
    EXPECT_GE(specfn::binom_tail_upper(20, 0.6, 8), oracle::binom_cdf(20, 0.6, 8));
    for (int n = 1; n <= 30; ++n) {
        for (double p : {0.3, 0.6, 0.75}) {
            for (int k = 1; k < n; ++k) {
                if (!(static_cast<double>(k) / n < p)) continue;
                EXPECT_GE(specfn::binom_tail_upper(n, p, k), oracle::binom_cdf(n, p, k))
                    << "n=" << n << " p=" << p << " k=" << k;
            }
        }
    }
    EXPECT_THROW(specfn::binom_tail_upper(10, 0.75, 9), DomainError);
    EXPECT_THROW(specfn::binom_tail_upper(10, 0.75, 0), DomainError);
}

TEST(BinomTailLower, KnownValueAndDomination) {
    EXPECT_NEAR(specfn::binom_tail_lower(10, 0.25, 7),
                std::exp(-10.0 * specfn::rel_entropy(0.7, 0.25)) / std::sqrt(20.0), 1e-15);
    EXPECT_LE(specfn::binom_tail_lower(10, 0.25, 7), oracle::binom_upper_tail(10, 0.25, 7));
    EXPECT_LE(specfn::binom_tail_lower(4, 0.3, 3), oracle::binom_upper_tail(4, 0.3, 3));
    for (int n = 1; n <= 30; ++n) {
        for (double p : {0.25, 0.4, 0.7}) {
            for (int k = 1; k < n; ++k) {
                if (!(static_cast<double>(k) / n > p)) continue;
                const double bound = specfn::binom_tail_lower(n, p, k);
                EXPECT_GT(bound, 0.0);
                EXPECT_LE(bound, 1.0);
                EXPECT_LE(bound, oracle::binom_upper_tail(n, p, k))
                    << "n=" << n << " p=" << p << " k=" << k;
            }
        }
    }
    EXPECT_THROW(specfn::binom_tail_lower(10, 0.25, 1), DomainError);
}
