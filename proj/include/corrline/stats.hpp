#pragma once

#include <cmath>
#include <cstdint>

namespace corrline::stats {

// Compensated (Kahan) accumulator for long sums.
class KahanSum {
  public:
    KahanSum() = default;
    explicit KahanSum(double x) : sum_(x) {}

    KahanSum& operator+=(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
        return *this;
    }

    double value() const { return sum_; }
    operator double() const { return sum_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// Welford running mean/variance with a deterministic pairwise merge.
// Merging partials in a fixed order yields bit-identical results
// regardless of how the work was scheduled.
class Welford {
  public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    void merge(const Welford& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(o.n_);
        const double d = o.mean_ - mean_;
        const double nt = na + nb;
        mean_ += d * nb / nt;
        m2_ += o.m2_ + d * d * na * nb / nt;
        n_ += o.n_;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double std_error() const {
        return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    }

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Bernoulli frequency counter.
struct Frequency {
    std::uint64_t hits = 0;
    std::uint64_t total = 0;

    void add(bool hit) {
        hits += hit ? 1 : 0;
        ++total;
    }
    void merge(const Frequency& o) {
        hits += o.hits;
        total += o.total;
    }
    double rate() const { return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0; }
    // sqrt(p(1-p)/N), the usual binomial standard error
    double std_error() const {
        if (total == 0) return 0.0;
        const double p = rate();
        return std::sqrt(p * (1.0 - p) / static_cast<double>(total));
    }
};

}  // namespace corrline::stats
