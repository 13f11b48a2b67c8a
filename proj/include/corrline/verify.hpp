#pragma once

// The acceptance checks behind `verify all`: every analytic statement the
// library implements is re-derived here from an independent route (dynamic
// program, exhaustive enumeration, Monte Carlo) and compared at a pinned
// tolerance. Checks are deterministic functions of (seed, parallelism is
// irrelevant to the results) and print one record each.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "corrline/interval.hpp"
#include "corrline/learn.hpp"
#include "corrline/oracle.hpp"
#include "corrline/parallel.hpp"
#include "corrline/regress.hpp"
#include "corrline/rng.hpp"
#include "corrline/stats.hpp"
#include "corrline/walk.hpp"

namespace corrline::verify {

struct VerifyConfig {
    std::uint64_t seed = 42;
    unsigned parallelism = 1;
    // When nonzero, Monte Carlo checks run min(default, cap) trials. The
    // tolerances are all expressed in sample standard errors, so reduced
    // runs stay meaningful.
    std::uint64_t trials_cap = 0;

    std::uint64_t trials(std::uint64_t preferred) const {
        return trials_cap > 0 ? std::min(preferred, trials_cap) : preferred;
    }
    std::uint64_t check_seed(int check_id) const {
        return rng::derive_seed(seed, static_cast<std::uint64_t>(check_id));
    }
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<std::pair<std::string, double>> metrics;
    std::string note;

    void metric(const std::string& key, double value) { metrics.emplace_back(key, value); }
    void require(bool ok, const std::string& why) {
        if (!ok && note.empty()) note = why;
        pass = pass && ok;
    }
};

inline const std::vector<double>& grid_p() {
    static const std::vector<double> grid{0.55, 0.6, 0.75, 0.9, 0.99};
    return grid;
}

// 1. Closed hypergeometric tail vs the dynamic program, |diff| <= 1e-9.
inline CheckResult check_exact_tail_vs_dp(const VerifyConfig&) {
    CheckResult r{1, "exact_tail_vs_dp_oracle", true, {}, ""};
    double worst = 0.0;
    for (double p : grid_p()) {
        const walk::BiasParams params(p);
        const walk::DpTail dp = walk::tail_dp_oracle(params, 60);
        for (std::int64_t t = 0; t <= 60; ++t) {
            const double exact = walk::tail_exact(params, t).raw_value;
            worst = std::max(worst, std::abs(exact - dp.survival[t]));
        }
    }
    r.metric("max_abs_diff", worst);
    r.metric("tolerance", 1e-9);
    r.require(worst <= 1e-9, "closed form disagrees with dynamic program");
    return r;
}

// 2. P(T >= t) <= (1 + sqrt 2)(4pq)^{t/2}, raw and unclamped.
inline CheckResult check_mgf_tail_bound(const VerifyConfig&) {
    CheckResult r{2, "mgf_tail_bound_dominates", true, {}, ""};
    double worst_margin = std::numeric_limits<double>::infinity();
    for (double p : grid_p()) {
        const walk::BiasParams params(p);
        const walk::DpTail dp = walk::tail_dp_oracle(params, 60);
        for (std::int64_t t = 0; t <= 60; ++t) {
            const double bound = walk::tail_upper_mgf(params, t).raw_value;
            worst_margin = std::min(worst_margin, bound - dp.survival[t]);
            r.require(dp.survival[t] <= bound, "tail exceeds the (1+sqrt2)(4pq)^{t/2} bound");
        }
    }
    r.metric("min_margin", worst_margin);
    return r;
}

// 3. Closed-form moments vs the dynamic program (1e-8) and vs simulation
// (four standard errors, 1e6 trials, stopping certificate 1e-9).
inline CheckResult check_moments(const VerifyConfig& cfg) {
    CheckResult r{3, "moments_closed_form_vs_dp_and_simulation", true, {}, ""};
    const std::uint64_t n_trials = cfg.trials(1'000'000);
    int slot = 0;
    for (double p : {0.6, 0.75, 0.9}) {
        const walk::BiasParams params(p);
        const walk::Moments closed = walk::moments(params);
        const oracle::DpMoments dp = oracle::dp_moments(params);
        r.require(std::abs(dp.mean - closed.mean) <= 1e-8, "dp mean mismatch");
        r.require(std::abs(dp.second_moment - closed.second_moment) <= 1e-8,
                  "dp second moment mismatch");

        stats::Welford t_agg, t2_agg;
        par::run_trials<std::pair<double, double>>(
            n_trials, cfg.parallelism, cfg.check_seed(3000 + slot),
            [&](std::uint64_t, rng::Stream& stream) {
                const double t = static_cast<double>(walk::simulate_T(params, 1e-9, stream).T);
                return std::pair<double, double>(t, t * t);
            },
            [&](std::uint64_t, const std::vector<std::pair<double, double>>& chunk) {
                for (const auto& [t, t2] : chunk) {
                    t_agg.add(t);
                    t2_agg.add(t2);
                }
            });
        const double mean_err = std::abs(t_agg.mean() - closed.mean);
        const double second_err = std::abs(t2_agg.mean() - closed.second_moment);
        r.metric("mc_mean_err_p" + std::to_string(slot), mean_err);
        r.require(mean_err <= 4.0 * t_agg.std_error() + 1e-9, "simulated mean beyond 4 SE");
        r.require(second_err <= 4.0 * t2_agg.std_error() + 1e-9,
                  "simulated second moment beyond 4 SE");
        ++slot;
    }
    r.metric("trials", static_cast<double>(n_trials));
    return r;
}

// 4. Closed-form MGF vs the weighted dynamic-programming sum on the valid
// (p, s) pairs; s = 0 must give 1 to 1e-12; invalid pairs must be rejected.
inline CheckResult check_mgf(const VerifyConfig&) {
    CheckResult r{4, "mgf_closed_form_vs_dp", true, {}, ""};
    double worst = 0.0;
    int rejected = 0;
    for (double p : {0.6, 0.75}) {
        const walk::BiasParams params(p);
        for (double s : {0.0, 0.01, 0.05}) {
            if (s > walk::mgf_domain_max(params)) {
                try {
                    walk::mgf(params, s);
                } catch (const DomainError&) {
                    ++rejected;
                    continue;
                }
                r.require(false, "mgf accepted s outside its domain");
                continue;
            }
            const double closed = walk::mgf(params, s);
            const double numeric = oracle::mgf_from_dp(params, s);
            worst = std::max(worst, std::abs(closed - numeric));
            if (s == 0.0) r.require(std::abs(closed - 1.0) <= 1e-12, "mgf(0) != 1");
        }
    }
    r.metric("max_abs_diff", worst);
    r.metric("rejected_out_of_domain", rejected);
    r.require(worst <= 1e-7, "mgf disagrees with dp sum");
    return r;
}

// 5. P(T = 2k) = P(T = 2k-1) for k = 1..15 from the dynamic program.
inline CheckResult check_parity(const VerifyConfig&) {
    CheckResult r{5, "pmf_parity_identity", true, {}, ""};
    double worst = 0.0;
    for (double p : grid_p()) {
        const walk::DpTail dp = walk::tail_dp_oracle(walk::BiasParams(p), 30);
        for (int k = 1; k <= 15; ++k)
            worst = std::max(worst, std::abs(dp.pmf[2 * k] - dp.pmf[2 * k - 1]));
    }
    r.metric("max_abs_diff", worst);
    r.require(worst <= 1e-12, "pmf parity identity fails");
    return r;
}

// 6. Lerch surrogate tracks the exact tail: bounded ratio, stable in t.
inline CheckResult check_lerch_ratio(const VerifyConfig&) {
    CheckResult r{6, "lerch_surrogate_ratio_stability", true, {}, ""};
    const walk::BiasParams params(0.75);
    const double r20 =
        walk::tail_exact(params, 20).raw_value / walk::tail_asymptotic(params, 20).raw_value;
    const double r40 =
        walk::tail_exact(params, 40).raw_value / walk::tail_asymptotic(params, 40).raw_value;
    r.metric("ratio_t20", r20);
    r.metric("ratio_t40", r40);
    r.require(r20 >= 0.1 && r20 <= 10.0 && r40 >= 0.1 && r40 <= 10.0,
              "ratio outside [0.1, 10]");
    r.require(std::abs(r40 / r20 - 1.0) < 0.2, "ratio drifts more than 20%");
    return r;
}

// 7. Optimal-set summary vs exhaustive enumeration on random instances.
inline CheckResult check_interval_summary(const VerifyConfig& cfg) {
    CheckResult r{7, "interval_summary_vs_bruteforce", true, {}, ""};
    const std::uint64_t instances = cfg.trials(500);
    for (std::uint64_t i = 0; i < instances && r.pass; ++i) {
        rng::Stream stream = rng::derive_stream(cfg.check_seed(7), i);
        const std::int64_t n = 1 + static_cast<std::int64_t>(stream.next_u64() % 200);
        const std::int64_t a = 1 + static_cast<std::int64_t>(stream.next_u64() % n);
        const std::int64_t b = a + static_cast<std::int64_t>(stream.next_u64() % (n - a + 1));
        const interval::Interval ref{a, b};
        interval::CorruptedSignal signal;
        if (stream.bernoulli(0.5)) {
            signal.values.resize(n);
            for (auto& v : signal.values) v = stream.bernoulli(0.5) ? 1 : -1;
        } else {
            signal = interval::corrupt(
                interval::PlantedInstance(n, ref, 0.4 * stream.uniform()), stream);
        }
        const auto fast = interval::optimal_set_summary(signal, ref);
        const auto brute = oracle::brute_summary(signal, ref);
        r.require(fast.max_score == brute.max_score, "max score mismatch");
        r.require(fast.count == brute.count, "optimal count mismatch");
        r.require(fast.max_sym_diff == brute.max_sym_diff, "max symmetric difference mismatch");
        r.require(fast.max_overlap_sym_diff == brute.max_overlap_sym_diff,
                  "overlapping symmetric difference mismatch");
        r.require(fast.phantom_exists == brute.phantom_exists, "phantom flag mismatch");
        bool witnesses_equal = fast.witness_examples.size() == brute.witness_examples.size();
        for (std::size_t w = 0; witnesses_equal && w < fast.witness_examples.size(); ++w) {
            const auto& fw = fast.witness_examples[w];
            const auto& bw = brute.witness_examples[w];
            witnesses_equal = fw.iv.start == bw.iv.start && fw.iv.end == bw.iv.end &&
                              fw.score == bw.score;
        }
        r.require(witnesses_equal, "witness list mismatch");
        if (fast.phantom_exists && *fast.phantom_exists) {
            const auto& pw = *fast.phantom_witness;
            r.require(!pw.iv.intersects(ref) && pw.score == fast.max_score,
                      "phantom witness not a disjoint optimum");
        }
    }
    r.metric("instances", static_cast<double>(instances));
    return r;
}

namespace detail {

inline double phantom_frequency(const VerifyConfig& cfg, std::uint64_t seed, std::int64_t n,
                                std::int64_t len, double q, std::uint64_t n_trials,
                                stats::Frequency* out_freq = nullptr) {
    stats::Frequency freq;
    par::run_trials<bool>(
        n_trials, cfg.parallelism, seed,
        [&](std::uint64_t, rng::Stream& stream) {
            const std::int64_t start =
                1 + static_cast<std::int64_t>(stream.next_u64() % (n - len + 1));
            const interval::Interval ref{start, start + len - 1};
            const auto signal = interval::corrupt(interval::PlantedInstance(n, ref, q), stream);
            const auto disjoint = interval::best_disjoint(signal, ref);
            return disjoint && disjoint->score == interval::max_score(signal);
        },
        [&](std::uint64_t, const std::vector<bool>& chunk) {
            for (bool hit : chunk) freq.add(hit);
        });
    if (out_freq) *out_freq = freq;
    return freq.rate();
}

}  // namespace detail

// 8. Phantom phase transition at p = 0.75, n = 1e5: rare above 1.5x the
// upper length threshold, near-certain below 0.5x the lower one.
inline CheckResult check_phase_transition(const VerifyConfig& cfg) {
    CheckResult r{8, "phantom_phase_transition", true, {}, ""};
    const std::int64_t n = 100'000;
    const walk::BiasParams params(0.75);
    const auto thresholds = interval::phantom_thresholds(n, params);
    const std::int64_t len_hi = static_cast<std::int64_t>(std::ceil(1.5 * thresholds.upper_len));
    const std::int64_t len_lo = static_cast<std::int64_t>(std::floor(0.5 * thresholds.lower_len));
    const std::uint64_t n_trials = cfg.trials(300);
    const double freq_hi =
        detail::phantom_frequency(cfg, cfg.check_seed(801), n, len_hi, params.q, n_trials);
    const double freq_lo =
        detail::phantom_frequency(cfg, cfg.check_seed(802), n, len_lo, params.q, n_trials);
    r.metric("len_above", static_cast<double>(len_hi));
    r.metric("freq_above", freq_hi);
    r.metric("len_below", static_cast<double>(len_lo));
    r.metric("freq_below", freq_lo);
    r.metric("trials_per_setting", static_cast<double>(n_trials));
    r.require(freq_hi <= 0.05, "phantom frequency above threshold not rare");
    r.require(freq_lo >= 0.95, "phantom frequency below threshold not near-certain");
    return r;
}

// 9. Explicit phantom bounds vs Monte Carlo on a fixed grid: the union-bound
// upper dominates the phantom frequency and the disjoint-block lower bound
// undercuts the weight-r frequency, within four standard errors.
inline CheckResult check_phantom_bounds(const VerifyConfig& cfg) {
    CheckResult r{9, "phantom_bounds_vs_monte_carlo", true, {}, ""};
    const std::uint64_t n_trials = cfg.trials(1000);
    int point = 0;

    struct UpperPoint {
        double p;
        std::int64_t n, len;
    };
    for (const auto& g : {UpperPoint{0.7, 2000, 120}, UpperPoint{0.7, 2000, 140},
                          UpperPoint{0.75, 2000, 75}, UpperPoint{0.75, 2000, 90}}) {
        const walk::BiasParams params(g.p);
        const double bound =
            std::min(1.0, interval::phantom_prob_upper(g.n, g.len, params));
        stats::Frequency freq;
        detail::phantom_frequency(cfg, cfg.check_seed(900 + point), g.n, g.len, params.q,
                                  n_trials, &freq);
        r.metric("upper_bound_" + std::to_string(point), bound);
        r.metric("upper_freq_" + std::to_string(point), freq.rate());
        r.require(freq.rate() <= bound + 4.0 * freq.std_error(),
                  "phantom frequency exceeds explicit upper bound");
        ++point;
    }

    struct LowerPoint {
        double p;
        std::int64_t n, len, weight;
    };
    point = 0;
    for (const auto& g :
         {LowerPoint{0.75, 2000, 20, 6}, LowerPoint{0.75, 10000, 20, 6},
          LowerPoint{0.75, 10000, 20, 10}, LowerPoint{0.7, 2000, 15, 5}}) {
        const walk::BiasParams params(g.p);
        const double bound = interval::pseudo_phantom_prob_lower(g.n, g.len, g.weight, params);
        stats::Frequency freq;
        par::run_trials<bool>(
            n_trials, cfg.parallelism, cfg.check_seed(950 + point),
            [&](std::uint64_t, rng::Stream& stream) {
                const std::int64_t start =
                    1 + static_cast<std::int64_t>(stream.next_u64() % (g.n - g.len + 1));
                const interval::Interval ref{start, start + g.len - 1};
                const auto signal =
                    interval::corrupt(interval::PlantedInstance(g.n, ref, params.q), stream);
                const auto disjoint = interval::best_disjoint(signal, ref);
                return disjoint && disjoint->score >= g.weight;
            },
            [&](std::uint64_t, const std::vector<bool>& chunk) {
                for (bool hit : chunk) freq.add(hit);
            });
        r.metric("lower_bound_" + std::to_string(point), bound);
        r.metric("lower_freq_" + std::to_string(point), freq.rate());
        r.require(freq.rate() >= bound - 4.0 * freq.std_error(),
                  "weight-r frequency falls below explicit lower bound");
        ++point;
    }
    r.metric("trials_per_point", static_cast<double>(n_trials));
    return r;
}

// 10. The right-side ERM deviation count and the walk's last bottom visit
// have the same distribution: survival functions within four standard errors.
inline CheckResult check_erm_walk_identity(const VerifyConfig& cfg) {
    CheckResult r{10, "erm_walk_distribution_identity", true, {}, ""};
    const double eta = 0.25;
    const std::uint64_t n_trials = cfg.trials(100'000);
    const learn::ThresholdScenario scenario(0.5, eta, 1.0, 0.5);
    const learn::PointDesign design = learn::PointDesign::integer_grid(400);
    std::vector<std::uint64_t> at_least(11, 0);
    par::run_trials<std::int64_t>(
        n_trials, cfg.parallelism, cfg.check_seed(10),
        [&](std::uint64_t, rng::Stream& stream) {
            return learn::run_threshold_trial(scenario, design, stream).right_count;
        },
        [&](std::uint64_t, const std::vector<std::int64_t>& chunk) {
            for (std::int64_t count : chunk)
                for (std::int64_t t = 0; t <= 10 && t <= count; ++t) ++at_least[t];
        });
    const walk::DpTail dp = walk::tail_dp_oracle(walk::BiasParams(1.0 - eta), 10);
    double worst_sigma = 0.0;
    for (std::int64_t t = 0; t <= 10; ++t) {
        const double freq =
            static_cast<double>(at_least[t]) / static_cast<double>(n_trials);
        const double se = std::sqrt(std::max(freq * (1.0 - freq), 0.0) /
                                    static_cast<double>(n_trials));
        const double diff = std::abs(freq - dp.survival[t]);
        worst_sigma = std::max(worst_sigma, se > 0 ? diff / se : (diff > 1e-9 ? 1e9 : 0.0));
        r.require(diff <= 4.0 * se + 1e-9, "deviation-count survival off by more than 4 SE");
    }
    r.metric("trials", static_cast<double>(n_trials));
    r.metric("worst_sigma", worst_sigma);
    return r;
}

// 11. Adversarial-design threshold learning at the calibrated sample size.
inline CheckResult check_threshold_success(const VerifyConfig& cfg) {
    CheckResult r{11, "threshold_erm_success_rate", true, {}, ""};
    const double eta = 0.25, delta = 0.05;
    const std::int64_t m = learn::sample_complexity_threshold(eta, delta);
    const learn::ThresholdScenario scenario(0.0, eta, 0.1, delta);
    const learn::PointDesign design = learn::PointDesign::banded(m);
    const std::uint64_t n_trials = cfg.trials(10'000);
    stats::Frequency freq;
    par::run_trials<bool>(
        n_trials, cfg.parallelism, cfg.check_seed(11),
        [&](std::uint64_t, rng::Stream& stream) {
            return learn::run_threshold_trial(scenario, design, stream).success;
        },
        [&](std::uint64_t, const std::vector<bool>& chunk) {
            for (bool hit : chunk) freq.add(hit);
        });
    r.metric("points_per_band", static_cast<double>(m));
    r.metric("success_rate", freq.rate());
    r.metric("trials", static_cast<double>(n_trials));
    r.require(freq.rate() >= 1.0 - delta, "success rate below 1 - delta");
    return r;
}

// 12. PAC under the uniform distribution with the calculator's sample size.
inline CheckResult check_pac_uniform(const VerifyConfig& cfg) {
    CheckResult r{12, "pac_uniform_success_rate", true, {}, ""};
    const double eta = 0.25, eps = 0.1, delta = 0.1;
    const std::int64_t m = learn::sample_complexity_pac(eta, eps, delta);
    const learn::ThresholdScenario scenario(0.35, eta, eps, delta);
    const std::uint64_t n_trials = cfg.trials(1000);
    stats::Frequency freq;
    par::run_trials<bool>(
        n_trials, cfg.parallelism, cfg.check_seed(12),
        [&](std::uint64_t, rng::Stream& stream) {
            return learn::run_pac_uniform(scenario, m, stream).success;
        },
        [&](std::uint64_t, const std::vector<bool>& chunk) {
            for (bool hit : chunk) freq.add(hit);
        });
    r.metric("sample_size", static_cast<double>(m));
    r.metric("success_rate", freq.rate());
    r.metric("trials", static_cast<double>(n_trials));
    r.require(freq.rate() >= 1.0 - delta, "success rate below 1 - delta");
    return r;
}

// 13. E||w_hat - w||^2 matches eta^2 sum sigma_i^{-2} within 3% on three
// fixed designs, including a near-degenerate one (condition number 1e3).
inline CheckResult check_regression_identity(const VerifyConfig& cfg) {
    CheckResult r{13, "ols_error_identity", true, {}, ""};
    const double eta = 0.5;
    const std::uint64_t n_draws = cfg.trials(10'000);
    struct DesignSpec {
        std::int64_t m, d;
        double cond;
    };
    const DesignSpec specs[] = {{50, 5, 1.0}, {100, 4, 1.0}, {60, 5, 1000.0}};
    int slot = 0;
    for (const auto& spec : specs) {
        const regress::Matrix x =
            regress::random_design(spec.m, spec.d, cfg.check_seed(1300 + slot), spec.cond);
        const regress::Vector w_true = regress::Vector::Ones(spec.d);
        const regress::Vector y0 = x * w_true;
        const double expected = regress::expected_error(x, eta);
        stats::Welford err;
        par::run_trials<double>(
            n_draws, cfg.parallelism, cfg.check_seed(1350 + slot),
            [&](std::uint64_t, rng::Stream& stream) {
                regress::Vector y = y0;
                for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += eta * stream.normal();
                return (regress::ols_fit(x, y) - w_true).squaredNorm();
            },
            [&](std::uint64_t, const std::vector<double>& chunk) {
                for (double v : chunk) err.add(v);
            });
        const double rel = std::abs(err.mean() / expected - 1.0);
        r.metric("rel_err_design" + std::to_string(slot), rel);
        r.require(rel <= 0.03, "empirical error off the identity by more than 3%");
        ++slot;
    }
    r.metric("draws_per_design", static_cast<double>(n_draws));
    return r;
}

inline std::vector<CheckResult> run_all(const VerifyConfig& cfg) {
    std::vector<CheckResult> results;
    results.push_back(check_exact_tail_vs_dp(cfg));
    results.push_back(check_mgf_tail_bound(cfg));
    results.push_back(check_moments(cfg));
    results.push_back(check_mgf(cfg));
    results.push_back(check_parity(cfg));
    results.push_back(check_lerch_ratio(cfg));
    results.push_back(check_interval_summary(cfg));
    results.push_back(check_phase_transition(cfg));
    results.push_back(check_phantom_bounds(cfg));
    results.push_back(check_erm_walk_identity(cfg));
    results.push_back(check_threshold_success(cfg));
    results.push_back(check_pac_uniform(cfg));
    results.push_back(check_regression_identity(cfg));
    return results;
}

}  // namespace corrline::verify
