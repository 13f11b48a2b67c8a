#pragma once

// Recovery of a planted interval from sign-flipped labels.
//
// J = {1..n} carries v(i) = +1 on a planted interval I and -1 elsewhere;
// each label is flipped independently with probability q < 1/2. Candidates
// are scored by the corrupted sum v'(I') and "optimal" means attaining the
// maximum score over all nonempty intervals. This header provides the
// corruption process, an O(n log n) summary of the optimal set (score,
// count, worst symmetric difference against I, phantom detection), and the
// explicit probability bounds governing when phantoms appear.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "corrline/errors.hpp"
#include "corrline/rng.hpp"
#include "corrline/specfn.hpp"
#include "corrline/walk.hpp"

namespace corrline::interval {

// Bound constant of the optimal-interval deviation tail, fixed by a Monte
// Carlo sweep against corrupt/summary trials (see README).
inline constexpr double kDeviationBoundC = 1.0;

// Closed integer interval [start, end], 1-based.
struct Interval {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::int64_t length() const { return end - start + 1; }
    bool intersects(const Interval& o) const { return start <= o.end && o.start <= end; }
    std::int64_t overlap(const Interval& o) const {
        return std::max<std::int64_t>(0, std::min(end, o.end) - std::max(start, o.start) + 1);
    }
    std::int64_t sym_diff(const Interval& o) const {
        return length() + o.length() - 2 * overlap(o);
    }
};

struct PlantedInstance {
    std::int64_t n = 0;
    Interval planted;
    double noise_q = 0.0;

    PlantedInstance(std::int64_t n_, Interval planted_, double noise_q_)
        : n(n_), planted(planted_), noise_q(noise_q_) {
        if (n < 1) throw DomainError("PlantedInstance: n must be >= 1");
        if (!(planted.start >= 1 && planted.start <= planted.end && planted.end <= n))
            throw DomainError("PlantedInstance: interval must lie inside {1..n}");
        if (!(noise_q >= 0.0 && noise_q < 0.5))
            throw DomainError("PlantedInstance: noise must lie in [0, 1/2)");
    }
};

// A +/-1 labeling of {1..n}; values[i] is the label of site i+1.
struct CorruptedSignal {
    std::vector<signed char> values;
    std::optional<PlantedInstance> instance;

    std::int64_t n() const { return static_cast<std::int64_t>(values.size()); }
};

struct IntervalCandidate {
    Interval iv;
    std::int64_t score = 0;
};

// +1 inside the planted interval, -1 outside, then independent sign flips.
inline CorruptedSignal corrupt(const PlantedInstance& instance, rng::Stream& stream) {
    CorruptedSignal signal;
    signal.values.resize(instance.n);
    for (std::int64_t i = 1; i <= instance.n; ++i) {
        signed char v = (i >= instance.planted.start && i <= instance.planted.end) ? 1 : -1;
        if (stream.bernoulli(instance.noise_q)) v = -v;
        signal.values[i - 1] = v;
    }
    signal.instance = instance;
    return signal;
}

namespace detail {

inline std::vector<std::int64_t> prefix_sums(const CorruptedSignal& signal) {
    std::vector<std::int64_t> prefix(signal.values.size() + 1, 0);
    for (std::size_t i = 0; i < signal.values.size(); ++i)
        prefix[i + 1] = prefix[i] + signal.values[i];
    return prefix;
}

// Best score over nonempty intervals [s, e] with lo <= s <= e <= hi,
// with one witness. Kadane on the prefix array.
inline std::optional<IntervalCandidate> best_in_range(const std::vector<std::int64_t>& prefix,
                                                      std::int64_t lo, std::int64_t hi) {
    if (lo > hi) return std::nullopt;
    IntervalCandidate best{{lo, lo}, std::numeric_limits<std::int64_t>::min()};
    std::int64_t min_prefix = prefix[lo - 1];
    std::int64_t min_pos = lo - 1;
    for (std::int64_t e = lo; e <= hi; ++e) {
        const std::int64_t score = prefix[e] - min_prefix;
        if (score > best.score) best = IntervalCandidate{{min_pos + 1, e}, score};
        if (prefix[e] < min_prefix) {
            min_prefix = prefix[e];
            min_pos = e;
        }
    }
    return best;
}

}  // namespace detail

// Maximum of v'(I') over all nonempty intervals (the empty interval is not a
// candidate, so an all-negative signal scores -1).
inline std::int64_t max_score(const CorruptedSignal& signal) {
    if (signal.n() < 1) throw DomainError("max_score: signal must be nonempty");
    const auto prefix = detail::prefix_sums(signal);
    return detail::best_in_range(prefix, 1, signal.n())->score;
}

// Best score among intervals disjoint from `ref`, i.e. entirely to its left
// or right. nullopt when no disjoint candidate exists.
inline std::optional<IntervalCandidate> best_disjoint(const CorruptedSignal& signal,
                                                      const Interval& ref) {
    const auto prefix = detail::prefix_sums(signal);
    const auto left = detail::best_in_range(prefix, 1, ref.start - 1);
    const auto right = detail::best_in_range(prefix, ref.end + 1, signal.n());
    if (!left) return right;
    if (!right) return left;
    return left->score >= right->score ? left : right;
}

// Summary of the optimal set against an optional reference interval.
struct OptimalSetSummary {
    std::int64_t max_score = 0;
    std::uint64_t count = 0;  // number of optimal intervals
    std::optional<std::int64_t> max_sym_diff;          // worst |I xor I'| over optimal I'
    std::optional<std::int64_t> max_overlap_sym_diff;  // same, restricted to I' meeting I
    std::optional<bool> phantom_exists;                // some optimal I' disjoint from I
    std::optional<IntervalCandidate> phantom_witness;
    std::vector<IntervalCandidate> witness_examples;   // up to 10, lexicographic
};

inline constexpr std::size_t kMaxWitnesses = 10;

// Computes the summary without materializing the optimal set (which can have
// Omega(n) members): positions are bucketed per prefix value, and for each
// right endpoint only the extremal left endpoints of each linear piece of
// |I xor I'| need to be inspected.
inline OptimalSetSummary optimal_set_summary(const CorruptedSignal& signal,
                                             std::optional<Interval> reference = std::nullopt) {
    const std::int64_t n = signal.n();
    if (n < 1) throw DomainError("optimal_set_summary: signal must be nonempty");
    if (reference && !(reference->start >= 1 && reference->start <= reference->end &&
                       reference->end <= n))
        throw DomainError("optimal_set_summary: reference interval must lie inside {1..n}");

    const auto prefix = detail::prefix_sums(signal);
    OptimalSetSummary out;
    out.max_score = detail::best_in_range(prefix, 1, n)->score;

    // Counting-sort buckets: for each prefix value (offset by +n), the
    // ascending list of positions 0..n where it occurs.
    const std::size_t n_values = static_cast<std::size_t>(2 * n + 1);
    std::vector<std::int32_t> bucket_start(n_values + 1, 0);
    for (std::int64_t i = 0; i <= n; ++i) ++bucket_start[prefix[i] + n + 1];
    for (std::size_t v = 1; v <= n_values; ++v) bucket_start[v] += bucket_start[v - 1];
    std::vector<std::int32_t> positions(n + 1);
    {
        std::vector<std::int32_t> cursor(bucket_start.begin(), bucket_start.end() - 1);
        for (std::int64_t i = 0; i <= n; ++i) positions[cursor[prefix[i] + n]++] = static_cast<std::int32_t>(i);
    }
    auto bucket = [&](std::int64_t value) -> std::pair<const std::int32_t*, const std::int32_t*> {
        if (value < -n || value > n) return {nullptr, nullptr};
        const std::size_t v = static_cast<std::size_t>(value + n);
        return {positions.data() + bucket_start[v], positions.data() + bucket_start[v + 1]};
    };

    // Count optimal (start-1, end) pairs and track symmetric differences.
    std::int64_t max_sym = -1, max_overlap_sym = -1;
    for (std::int64_t e = 1; e <= n; ++e) {
        const auto [lo, hi] = bucket(prefix[e] - out.max_score);
        if (lo == hi) continue;
        // starts are i+1 for bucket members i <= e-1
        const auto* cut = std::upper_bound(lo, hi, static_cast<std::int32_t>(e - 1));
        out.count += static_cast<std::uint64_t>(cut - lo);
        if (!reference || cut == lo) continue;

        const std::int64_t a = reference->start, b = reference->end;
        // |I xor [i+1, e]| is piecewise linear in i with breaks at a-1 and b;
        // inspect each piece's extremal candidates.
        auto consider = [&](const std::int32_t* c) {
            const Interval trial{static_cast<std::int64_t>(*c) + 1, e};
            const std::int64_t sym = reference->sym_diff(trial);
            max_sym = std::max(max_sym, sym);
            if (reference->overlap(trial) > 0) max_overlap_sym = std::max(max_overlap_sym, sym);
        };
        auto last_at_most = [&](std::int64_t limit) {
            const auto* it = std::upper_bound(lo, cut, static_cast<std::int32_t>(limit));
            if (it != lo) consider(it - 1);
        };
        auto first_at_least = [&](std::int64_t limit) {
            const auto* it = std::lower_bound(lo, cut, static_cast<std::int32_t>(limit));
            if (it != cut) consider(it);
        };
        consider(lo);       // min i
        consider(cut - 1);  // max i <= e-1
        last_at_most(a - 2);
        first_at_least(a - 1);
        last_at_most(b - 1);
        first_at_least(b);
    }

    // Lexicographically first optimal intervals as witnesses.
    for (std::int64_t s = 1; s <= n && out.witness_examples.size() < kMaxWitnesses; ++s) {
        const auto [lo, hi] = bucket(prefix[s - 1] + out.max_score);
        for (const auto* e = std::lower_bound(lo, hi, static_cast<std::int32_t>(s));
             e < hi && out.witness_examples.size() < kMaxWitnesses; ++e) {
            out.witness_examples.push_back(IntervalCandidate{{s, *e}, out.max_score});
        }
    }

    if (reference) {
        out.max_sym_diff = max_sym;
        out.max_overlap_sym_diff = max_overlap_sym >= 0 ? std::optional<std::int64_t>(max_overlap_sym)
                                                        : std::nullopt;
        const auto disjoint = best_disjoint(signal, *reference);
        out.phantom_exists = disjoint && disjoint->score == out.max_score;
        if (*out.phantom_exists) out.phantom_witness = disjoint;
    }
    return out;
}

// Tail bound on the worst optimal deviation T = max(|I xor I'| : I' optimal):
//   P(T >= t) <= C n (4pq)^{t/2} / (p-q)^4.
// The constant is a calibration parameter; the default comes from a sweep.
inline double deviation_tail_bound(std::int64_t n, const walk::BiasParams& params, std::int64_t t,
                                   double constant = kDeviationBoundC) {
    walk::require_interior(params, "deviation_tail_bound");
    if (n < 1) throw DomainError("deviation_tail_bound: n must be >= 1");
    if (t < 0 || t > n) throw DomainError("deviation_tail_bound: requires 0 <= t <= n");
    const double d = params.drift();
    return constant * static_cast<double>(n) *
           std::pow(params.four_pq(), static_cast<double>(t) / 2.0) / (d * d * d * d);
}

// Interval lengths at which phantoms disappear/appear as n grows:
//   upper_len = ln(n) / D(1/2 || p)   (above: no phantom, asymptotically)
//   lower_len = ln(n) / D(q || p)     (below: phantom, asymptotically)
struct PhantomThresholds {
    double upper_len = 0.0;
    double lower_len = 0.0;
};

inline PhantomThresholds phantom_thresholds(std::int64_t n, const walk::BiasParams& params) {
    walk::require_interior(params, "phantom_thresholds");
    if (n < 2) throw DomainError("phantom_thresholds: n must be >= 2");
    const double log_n = std::log(static_cast<double>(n));
    return PhantomThresholds{log_n / specfn::rel_entropy(0.5, params.p),
                             log_n / specfn::rel_entropy(params.q, params.p)};
}

// Explicit upper bound on the phantom probability:
//   (1 - e^{-(n+1) D}) / (1 - e^{-D}) * n * e^{-|I| D},  D = D(1/2 || p).
inline double phantom_prob_upper(std::int64_t n, std::int64_t interval_len,
                                 const walk::BiasParams& params) {
    walk::require_interior(params, "phantom_prob_upper");
    if (n < 1 || interval_len < 1 || interval_len > n)
        throw DomainError("phantom_prob_upper: requires 1 <= |I| <= n");
    const double d = specfn::rel_entropy(0.5, params.p);
    const double nd = static_cast<double>(n);
    const double geom = (1.0 - std::exp(-(nd + 1.0) * d)) / (1.0 - std::exp(-d));
    return geom * nd * std::exp(-static_cast<double>(interval_len) * d);
}

// Bound on the probability of an optimal interval that meets I but has
// symmetric difference at least t:
//   c [ t (4pq)^{t/2} / (1 - sqrt(4pq)) + (4pq)^{t/2} / (1 - sqrt(4pq))^2 ].
inline double overlapping_distant_prob(const walk::BiasParams& params, std::int64_t t,
                                       double constant = 1.0) {
    walk::require_interior(params, "overlapping_distant_prob");
    if (t < 1) throw DomainError("overlapping_distant_prob: t must be >= 1");
    const double geo = std::pow(params.four_pq(), static_cast<double>(t) / 2.0);
    const double gap = 1.0 - std::sqrt(params.four_pq());
    return constant * (static_cast<double>(t) * geo / gap + geo / (gap * gap));
}

// Lower bound on the probability of a disjoint interval of score >= r:
//   1 - (1 - e^{-|I| D((r+|I|)/(2|I|) || q)} / sqrt(2|I|))^{n/|I| - 4},
// clamped to [0, 1]; 0 whenever n/|I| <= 4.
inline double pseudo_phantom_prob_lower(std::int64_t n, std::int64_t interval_len, std::int64_t r,
                                        const walk::BiasParams& params) {
    walk::require_interior(params, "pseudo_phantom_prob_lower");
    if (interval_len < 1 || interval_len > n)
        throw DomainError("pseudo_phantom_prob_lower: requires 1 <= |I| <= n");
    if (r < 0 || r > interval_len)
        throw DomainError("pseudo_phantom_prob_lower: requires 0 <= r <= |I|");
    const double len = static_cast<double>(interval_len);
    const double frac = (static_cast<double>(r) + len) / (2.0 * len);
    if (!(frac > params.q && frac < 1.0))
        throw DomainError("pseudo_phantom_prob_lower: entropy argument must lie in (q, 1)");
    const double hit = std::exp(-len * specfn::rel_entropy(frac, params.q)) / std::sqrt(2.0 * len);
    const double exponent = static_cast<double>(n) / len - 4.0;
    const double miss_all = std::pow(1.0 - hit, exponent);
    return std::clamp(1.0 - miss_all, 0.0, 1.0);
}

// Text format: first line n, second line the +/-1 entries space-separated.
inline void save_signal(std::ostream& os, const CorruptedSignal& signal) {
    os << signal.n() << "\n";
    for (std::int64_t i = 0; i < signal.n(); ++i) {
        if (i > 0) os << ' ';
        os << static_cast<int>(signal.values[i]);
    }
    os << "\n";
}

inline CorruptedSignal load_signal(std::istream& is) {
    std::int64_t n = 0;
    if (!(is >> n) || n < 1) throw ValidationError("signal: first line must be a positive count");
    CorruptedSignal signal;
    signal.values.resize(n);
    for (std::int64_t i = 0; i < n; ++i) {
        int v = 0;
        if (!(is >> v) || (v != 1 && v != -1))
            throw ValidationError("signal: entries must be +1 or -1");
        signal.values[i] = static_cast<signed char>(v);
    }
    return signal;
}

inline void save_signal_file(const std::string& path, const CorruptedSignal& signal) {
    std::ofstream os(path);
    if (!os) throw ValidationError("signal: cannot open " + path + " for writing");
    save_signal(os, signal);
}

inline CorruptedSignal load_signal_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("signal: cannot open " + path);
    return load_signal(is);
}

}  // namespace corrline::interval
