#pragma once

// ERM learning of thresholds and intervals from labels flipped with
// probability eta < 1/2, on arbitrary (adversarial) point sets.
//
// A threshold h_a predicts +1 on [a, inf). Sweeping the cut across the
// sorted sample turns the mistake profile into a +/-1 random walk, so the
// worst ERM deviation on one side of the target is distributed like the last
// bottom visit of an upward-biased walk; the sample-size calculators below
// make that bound explicit. Interval hypotheses reduce to a best-run search
// over the label sequence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "corrline/errors.hpp"
#include "corrline/rng.hpp"
#include "corrline/walk.hpp"

namespace corrline::learn {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Ordered sample of labeled points. Points must be strictly increasing;
// duplicate x-values are rejected rather than perturbed (callers own any
// jittering policy).
struct NoisySample {
    std::vector<double> points;
    std::vector<signed char> labels;

    std::int64_t size() const { return static_cast<std::int64_t>(points.size()); }

    static NoisySample create(std::vector<double> points, std::vector<signed char> labels) {
        if (points.size() != labels.size())
            throw ValidationError("NoisySample: points/labels size mismatch");
        if (points.empty()) throw ValidationError("NoisySample: sample must be nonempty");
        std::vector<std::size_t> order(points.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
        NoisySample out;
        out.points.reserve(points.size());
        out.labels.reserve(points.size());
        for (std::size_t i : order) {
            if (!out.points.empty() && !(points[i] > out.points.back()))
                throw ValidationError("NoisySample: duplicate x-values are not accepted");
            if (labels[i] != 1 && labels[i] != -1)
                throw ValidationError("NoisySample: labels must be +/-1");
            out.points.push_back(points[i]);
            out.labels.push_back(labels[i]);
        }
        return out;
    }
};

// Maximal interval of thresholds (lo, hi] attaining the minimum mistake
// count; lo/hi may be -inf/+inf.
struct CutCell {
    double lo = -kInf;
    double hi = kInf;
};

struct ErmSolution {
    std::vector<CutCell> optimal_cells;  // maximal, in increasing order
    std::int64_t mistakes = 0;

    // Largest distance from a_star to any boundary of any optimal cell;
    // infinite when an optimal cell is unbounded.
    double worst_deviation(double a_star) const {
        double worst = 0.0;
        for (const CutCell& cell : optimal_cells) {
            worst = std::max(worst, std::abs(cell.lo - a_star));
            worst = std::max(worst, std::abs(cell.hi - a_star));
        }
        return worst;
    }
};

// Minimize disagreements of h_a over the m+1 cut positions. Walking the cut
// right past point k flips that point's prediction to -1, so the mistake
// profile is base + sum_{i<=k} y_i and the optima are the profile minima.
inline ErmSolution erm_threshold(const NoisySample& sample) {
    const std::int64_t m = sample.size();
    std::vector<std::int64_t> profile(m + 1, 0);
    std::int64_t base = 0;
    for (std::int64_t i = 0; i < m; ++i) base += sample.labels[i] == -1 ? 1 : 0;
    for (std::int64_t k = 1; k <= m; ++k) profile[k] = profile[k - 1] + sample.labels[k - 1];
    const std::int64_t best = *std::min_element(profile.begin(), profile.end());

    ErmSolution out;
    out.mistakes = base + best;
    auto cell_lo = [&](std::int64_t k) { return k == 0 ? -kInf : sample.points[k - 1]; };
    auto cell_hi = [&](std::int64_t k) { return k == m ? kInf : sample.points[k]; };
    std::int64_t k = 0;
    while (k <= m) {
        if (profile[k] != best) {
            ++k;
            continue;
        }
        std::int64_t run_end = k;
        while (run_end + 1 <= m && profile[run_end + 1] == best) ++run_end;
        out.optimal_cells.push_back(CutCell{cell_lo(k), cell_hi(run_end)});
        k = run_end + 1;
    }
    return out;
}

// Index of the last minimum of the one-sided mistake profile over sample
// points strictly right of a_star (in units of points, 0 = at a_star). This
// is the statistic that matches the walk's last bottom visit.
inline std::int64_t right_deviation_count(const NoisySample& sample, double a_star) {
    std::int64_t s = 0, best = 0, arg = 0, j = 0;
    for (std::int64_t i = 0; i < sample.size(); ++i) {
        if (!(sample.points[i] > a_star)) continue;
        ++j;
        s += sample.labels[i];
        if (s <= best) {
            best = s;
            arg = j;
        }
    }
    return arg;
}

inline std::int64_t left_deviation_count(const NoisySample& sample, double a_star) {
    std::int64_t s = 0, best = 0, arg = 0, j = 0;
    for (std::int64_t i = sample.size() - 1; i >= 0; --i) {
        if (!(sample.points[i] < a_star)) continue;
        ++j;
        s -= sample.labels[i];
        if (s <= best) {
            best = s;
            arg = j;
        }
    }
    return arg;
}

// Hypothesis cells of one optimal run [i..j] of positive predictions:
// a in (a_lo, a_hi], b in [b_lo, b_hi).
struct IntervalCellPair {
    CutCell a_cell;
    CutCell b_cell;
};

struct IntervalErmSolution {
    std::vector<IntervalCellPair> optima;  // up to 10, lexicographic by run
    std::uint64_t optimal_run_count = 0;
    bool empty_hypothesis_optimal = false;  // predicting nothing positive is optimal
    std::int64_t mistakes = 0;
    // Worst per-endpoint deviations over all optima (only when a target was
    // supplied); infinite if the empty hypothesis is optimal or a cell is
    // unbounded.
    double dev_a = 0.0;
    double dev_b = 0.0;
};

inline constexpr std::size_t kMaxIntervalOptima = 10;

// ERM over interval hypotheses h_{(a,b)} (predict +1 iff a <= x <= b).
// Equivalent to maximizing the run score sum_{i in run} y_i, with the empty
// run admitted at score 0. When `target` = (a*, b*) is given, worst
// deviations are computed exactly over the whole optimal set.
inline IntervalErmSolution erm_interval(
    const NoisySample& sample, std::optional<std::pair<double, double>> target = std::nullopt) {
    const std::int64_t m = sample.size();
    std::vector<std::int64_t> prefix(m + 1, 0);
    std::int64_t total_pos = 0;
    for (std::int64_t i = 0; i < m; ++i) {
        prefix[i + 1] = prefix[i] + sample.labels[i];
        total_pos += sample.labels[i] == 1 ? 1 : 0;
    }
    std::int64_t best_run = std::numeric_limits<std::int64_t>::min();
    std::int64_t min_prefix = prefix[0];
    for (std::int64_t j = 1; j <= m; ++j) {
        best_run = std::max(best_run, prefix[j] - min_prefix);
        min_prefix = std::min(min_prefix, prefix[j]);
    }
    const std::int64_t best = std::max<std::int64_t>(best_run, 0);

    IntervalErmSolution out;
    out.mistakes = total_pos - best;
    out.empty_hypothesis_optimal = best_run <= 0;

    auto a_cell_of = [&](std::int64_t i) {  // run starts at sample index i (1-based)
        return CutCell{i == 1 ? -kInf : sample.points[i - 2], sample.points[i - 1]};
    };
    auto b_cell_of = [&](std::int64_t j) {  // run ends at sample index j (1-based)
        return CutCell{sample.points[j - 1], j == m ? kInf : sample.points[j]};
    };

    if (target) {
        out.dev_a = out.empty_hypothesis_optimal ? kInf : 0.0;
        out.dev_b = out.dev_a;
    }

    if (best_run == best) {
        // Bucket prefix positions by value; run [i..j] is optimal iff
        // prefix[j] - prefix[i-1] == best.
        std::vector<std::pair<std::int64_t, std::int64_t>> by_value(m + 1);
        for (std::int64_t i = 0; i <= m; ++i) by_value[i] = {prefix[i], i};
        std::sort(by_value.begin(), by_value.end());
        auto bucket = [&](std::int64_t value) {
            return std::equal_range(by_value.begin(), by_value.end(),
                                    std::make_pair(value, std::int64_t{-1}),
                                    [](const auto& a, const auto& b) { return a.first < b.first; });
        };
        for (std::int64_t j = 1; j <= m; ++j) {
            auto [lo, hi] = bucket(prefix[j] - best);
            // positions i-1 must be <= j-1
            auto cut = std::lower_bound(lo, hi, std::make_pair(prefix[j] - best, j));
            if (cut == lo) continue;
            out.optimal_run_count += static_cast<std::uint64_t>(cut - lo);
            if (target) {
                // x-boundaries are monotone in the start index, so the worst
                // |boundary - a*| over the bucket is at one of its ends.
                for (const auto* c : {&*lo, &*(cut - 1)}) {
                    const CutCell a_cell = a_cell_of(c->second + 1);
                    out.dev_a = std::max({out.dev_a, std::abs(a_cell.lo - target->first),
                                          std::abs(a_cell.hi - target->first)});
                }
                const CutCell b_cell = b_cell_of(j);
                out.dev_b = std::max({out.dev_b, std::abs(b_cell.lo - target->second),
                                      std::abs(b_cell.hi - target->second)});
            }
        }
        // lexicographically first runs as witnesses
        for (std::int64_t i = 1; i <= m && out.optima.size() < kMaxIntervalOptima; ++i) {
            auto [lo, hi] = bucket(prefix[i - 1] + best);
            for (auto it = std::lower_bound(lo, hi, std::make_pair(prefix[i - 1] + best, i));
                 it != hi && out.optima.size() < kMaxIntervalOptima; ++it) {
                out.optima.push_back(IntervalCellPair{a_cell_of(i), b_cell_of(it->second)});
            }
        }
    }
    return out;
}

// Points needed in each epsilon-band around the target threshold so that ERM
// stays within epsilon with probability 1 - delta. Derived by requiring the
// explicit tail bound (1 + sqrt 2)(4 eta (1-eta))^{m/2} <= delta/2 on each
// side and taking a union bound:
//   m0 = ceil( 2 ln(2 (1 + sqrt 2)/delta) / ln(1/(4 eta (1 - eta))) ).
inline std::int64_t sample_complexity_threshold(double eta, double delta) {
    if (!(eta >= 0.0 && eta < 0.5))
        throw DomainError("sample_complexity_threshold: requires 0 <= eta < 1/2");
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("sample_complexity_threshold: requires 0 < delta < 1");
    if (eta == 0.0) return 1;  // a single point on each side pins the threshold
    const double rate = std::log(1.0 / (4.0 * eta * (1.0 - eta)));
    const double m = 2.0 * std::log(2.0 * (1.0 + walk::kSqrt2) / delta) / rate;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(m)));
}

// Interval analogue: four bands and a four-way union bound. The polylog
// slack of the interval analysis is exposed as an explicit factor.
inline std::int64_t sample_complexity_interval(double eta, double delta,
                                               double polylog_factor = 1.0) {
    if (!(eta >= 0.0 && eta < 0.5))
        throw DomainError("sample_complexity_interval: requires 0 <= eta < 1/2");
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("sample_complexity_interval: requires 0 < delta < 1");
    if (!(polylog_factor > 0.0))
        throw DomainError("sample_complexity_interval: factor must be positive");
    if (eta == 0.0) return 1;
    const double rate = std::log(1.0 / (4.0 * eta * (1.0 - eta)));
    const double m = 2.0 * std::log(4.0 * (1.0 + walk::kSqrt2) / delta) / rate;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(polylog_factor * m)));
}

// Uniform-distribution PAC sample size: enough i.i.d. draws that each
// epsilon-band around the target receives the adversarial-design quota with
// probability 1 - delta/2 (multiplicative Chernoff); the band quota itself
// is budgeted at delta/2.
inline std::int64_t sample_complexity_pac(double eta, double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw DomainError("sample_complexity_pac: requires 0 < epsilon < 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("sample_complexity_pac: requires 0 < delta < 1");
    const double band_quota = static_cast<double>(sample_complexity_threshold(eta, delta / 2.0));
    const double m = 2.0 / epsilon * (band_quota + 2.0 * std::log(4.0 / delta));
    return static_cast<std::int64_t>(std::ceil(m));
}

struct ThresholdScenario {
    double a_star = 0.0;
    double eta = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;

    ThresholdScenario(double a_star_, double eta_, double epsilon_, double delta_)
        : a_star(a_star_), eta(eta_), epsilon(epsilon_), delta(delta_) {
        if (!(eta >= 0.0 && eta < 0.5)) throw DomainError("ThresholdScenario: requires eta in [0, 1/2)");
        if (!(epsilon > 0.0)) throw DomainError("ThresholdScenario: requires epsilon > 0");
        if (!(delta > 0.0 && delta < 1.0)) throw DomainError("ThresholdScenario: requires delta in (0, 1)");
    }
};

// Placement of the training points for one trial.
struct PointDesign {
    enum class Kind { banded, integer_grid };
    Kind kind = Kind::banded;
    std::int64_t points_per_band = 0;  // banded: evenly spaced in each epsilon-band
    std::int64_t points_per_side = 0;  // integer grid straddling the target

    static PointDesign banded(std::int64_t m) {
        if (m < 1) throw DomainError("PointDesign: points_per_band must be >= 1");
        return PointDesign{Kind::banded, m, 0};
    }
    static PointDesign integer_grid(std::int64_t n) {
        if (n < 1) throw DomainError("PointDesign: points_per_side must be >= 1");
        return PointDesign{Kind::integer_grid, 0, n};
    }
};

struct ThresholdTrial {
    double worst_deviation = 0.0;
    bool success = false;
    std::int64_t right_count = 0;
    std::int64_t left_count = 0;
    std::int64_t mistakes = 0;
};

namespace detail {

inline NoisySample make_labeled(const std::vector<double>& points, double a_star, double eta,
                                rng::Stream& stream) {
    std::vector<signed char> labels(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        signed char y = points[i] >= a_star ? 1 : -1;
        if (eta > 0.0 && stream.bernoulli(eta)) y = -y;
        labels[i] = y;
    }
    return NoisySample::create(points, std::move(labels));
}

}  // namespace detail

// Label the designed points with h_{a*}, flip each with probability eta, run
// ERM, and report the worst deviation.
inline ThresholdTrial run_threshold_trial(const ThresholdScenario& scenario,
                                          const PointDesign& design, rng::Stream& stream) {
    std::vector<double> points;
    if (design.kind == PointDesign::Kind::banded) {
        const std::int64_t m = design.points_per_band;
        const double eps = scenario.epsilon;
        points.reserve(2 * m);
        for (std::int64_t i = m; i >= 1; --i)  // [a*-eps, a*)
            points.push_back(scenario.a_star - eps * static_cast<double>(i) / static_cast<double>(m));
        for (std::int64_t i = 1; i <= m; ++i)  // (a*, a*+eps]
            points.push_back(scenario.a_star + eps * static_cast<double>(i) / static_cast<double>(m));
    } else {
        const std::int64_t n = design.points_per_side;
        points.reserve(2 * n);
        for (std::int64_t i = n; i >= 1; --i)
            points.push_back(scenario.a_star - 0.5 - static_cast<double>(i - 1));
        for (std::int64_t i = 1; i <= n; ++i)
            points.push_back(scenario.a_star + 0.5 + static_cast<double>(i - 1));
    }
    const NoisySample sample = detail::make_labeled(points, scenario.a_star, scenario.eta, stream);
    const ErmSolution erm = erm_threshold(sample);
    ThresholdTrial trial;
    trial.worst_deviation = erm.worst_deviation(scenario.a_star);
    trial.success = trial.worst_deviation <= scenario.epsilon;
    trial.right_count = right_deviation_count(sample, scenario.a_star);
    trial.left_count = left_deviation_count(sample, scenario.a_star);
    trial.mistakes = erm.mistakes;
    return trial;
}

struct PacTrial {
    double error = 0.0;
    bool success = false;
};

// PAC under the uniform distribution on [0, 1]: the generalization error of
// h_b against h_{a*} is |b - a*| with b clamped to [0, 1], taken at worst
// over the optimal cells.
inline PacTrial run_pac_uniform(const ThresholdScenario& scenario, std::int64_t m,
                                rng::Stream& stream) {
    if (!(scenario.a_star >= 0.0 && scenario.a_star <= 1.0))
        throw DomainError("run_pac_uniform: a_star must lie in [0, 1]");
    if (m < 1) throw DomainError("run_pac_uniform: m must be >= 1");
    std::vector<double> points;
    points.reserve(m);
    for (std::int64_t i = 0; i < m; ++i) points.push_back(stream.uniform());
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());  // measure-zero ties
    const NoisySample sample = detail::make_labeled(points, scenario.a_star, scenario.eta, stream);
    const ErmSolution erm = erm_threshold(sample);
    auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
    PacTrial trial;
    for (const CutCell& cell : erm.optimal_cells) {
        trial.error = std::max(trial.error, std::abs(clamp01(cell.lo) - scenario.a_star));
        trial.error = std::max(trial.error, std::abs(clamp01(cell.hi) - scenario.a_star));
    }
    trial.success = trial.error <= scenario.epsilon;
    return trial;
}

struct IntervalScenario {
    double a_star = 0.0;
    double b_star = 0.0;
    double eta = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;

    IntervalScenario(double a_star_, double b_star_, double eta_, double epsilon_, double delta_)
        : a_star(a_star_), b_star(b_star_), eta(eta_), epsilon(epsilon_), delta(delta_) {
        if (!(eta >= 0.0 && eta < 0.5)) throw DomainError("IntervalScenario: requires eta in [0, 1/2)");
        if (!(epsilon > 0.0)) throw DomainError("IntervalScenario: requires epsilon > 0");
        if (!(delta > 0.0 && delta < 1.0)) throw DomainError("IntervalScenario: requires delta in (0, 1)");
        if (!(b_star - a_star > 2.0 * epsilon))
            throw DomainError("IntervalScenario: requires b* - a* > 2 epsilon");
    }
};

struct IntervalTrial {
    double dev_a = 0.0;
    double dev_b = 0.0;
    bool success = false;
};

// Four epsilon-bands (two around each endpoint), noisy labels, interval ERM.
inline IntervalTrial run_interval_trial(const IntervalScenario& scenario, std::int64_t m_per_band,
                                        rng::Stream& stream) {
    if (m_per_band < 1) throw DomainError("run_interval_trial: m_per_band must be >= 1");
    const double eps = scenario.epsilon;
    const double md = static_cast<double>(m_per_band);
    std::vector<double> points;
    points.reserve(4 * m_per_band);
    for (double center : {scenario.a_star, scenario.b_star}) {
        for (std::int64_t i = m_per_band; i >= 1; --i)
            points.push_back(center - eps * static_cast<double>(i) / md);
        for (std::int64_t i = 1; i <= m_per_band; ++i)
            points.push_back(center + eps * static_cast<double>(i) / md);
    }
    std::sort(points.begin(), points.end());
    std::vector<signed char> labels(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        signed char y = (points[i] >= scenario.a_star && points[i] <= scenario.b_star) ? 1 : -1;
        if (scenario.eta > 0.0 && stream.bernoulli(scenario.eta)) y = -y;
        labels[i] = y;
    }
    const NoisySample sample = NoisySample::create(std::move(points), std::move(labels));
    const IntervalErmSolution erm =
        erm_interval(sample, std::make_pair(scenario.a_star, scenario.b_star));
    IntervalTrial trial;
    trial.dev_a = erm.dev_a;
    trial.dev_b = erm.dev_b;
    trial.success = trial.dev_a <= eps && trial.dev_b <= eps;
    return trial;
}

// Two-column text: x-value then +/-1 label, whitespace separated.
inline NoisySample load_sample(std::istream& is) {
    std::vector<double> points;
    std::vector<signed char> labels;
    double x = 0.0;
    int y = 0;
    while (is >> x >> y) {
        if (y != 1 && y != -1) throw ValidationError("sample: labels must be +1 or -1");
        points.push_back(x);
        labels.push_back(static_cast<signed char>(y));
    }
    if (!is.eof()) throw ValidationError("sample: malformed line");
    return NoisySample::create(std::move(points), std::move(labels));
}

inline NoisySample load_sample_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("sample: cannot open " + path);
    return load_sample(is);
}

}  // namespace corrline::learn
