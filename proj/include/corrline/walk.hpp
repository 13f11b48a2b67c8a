#pragma once

// Last visit to the bottommost point of an upward-biased +/-1 random walk.
//
// With up-step probability p > 1/2, q = 1 - p, S_0 = 0 and B = min_t S_t,
// the random variable of interest is T = max{t >= 0 : S_t = B}. This header
// provides a simulator with a certified stopping rule, an exact triangular
// dynamic program for the distribution of T, the closed hypergeometric form
// of P(T >= t), the moment generating function and first two moments, a
// Lerch-transcendent asymptotic surrogate, and elementary upper/lower
// envelopes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "corrline/errors.hpp"
#include "corrline/rng.hpp"
#include "corrline/specfn.hpp"
#include "corrline/stats.hpp"

namespace corrline::walk {

inline constexpr double kSqrt2 = 1.4142135623730950488;

// Elementary tail envelope constants, fixed once by sweeping the envelope
// shapes against the exact tail over p in {0.55..0.99}, t in 1..80 (see
// README). The sweep required c_up >= 8.0 and c_low <= 0.52 (both binding at
// p = 0.99); the defaults carry a 1.5x margin.
inline constexpr double kElementaryUpperC = 12.0;
inline constexpr double kElementaryLowerC = 0.34;

// Walk parameters. Requires 1/2 < p <= 1; q is always 1 - p.
struct BiasParams {
    double p;
    double q;

    explicit BiasParams(double p_) : p(p_), q(1.0 - p_) {
        if (!(p > 0.5 && p <= 1.0)) throw DomainError("BiasParams: requires 1/2 < p <= 1");
    }

    double four_pq() const { return 4.0 * p * q; }
    double drift() const { return p - q; }
    bool degenerate() const { return p == 1.0; }
};

inline void require_interior(const BiasParams& params, const char* who) {
    if (params.degenerate()) throw DomainError(std::string(who) + ": requires p < 1");
}

inline std::int64_t tau_of(std::int64_t t) { return (t + 1) / 2; }

enum class TailMethod {
    exact_series,
    dp_oracle,
    mgf_bound,
    lerch_asymptotic,
    elementary_upper,
    elementary_lower,
    monte_carlo,
};

inline const char* to_string(TailMethod m) {
    switch (m) {
        case TailMethod::exact_series: return "exact_series";
        case TailMethod::dp_oracle: return "dp_oracle";
        case TailMethod::mgf_bound: return "mgf_bound";
        case TailMethod::lerch_asymptotic: return "lerch_asymptotic";
        case TailMethod::elementary_upper: return "elementary_upper";
        case TailMethod::elementary_lower: return "elementary_lower";
        case TailMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

// One estimate of P(T >= t). `raw_value` keeps the unclamped number so that
// bound-violation tests stay meaningful; `probability` is clamped to [0, 1].
// For the Lerch surrogate only raw_value is meaningful as a magnitude.
struct TailEstimate {
    double probability = 0.0;
    double raw_value = 0.0;
    double error_bound = 0.0;  // truncation bound or statistical half-width
    TailMethod method = TailMethod::exact_series;
    std::int64_t tau = 0;
};

inline TailEstimate make_estimate(double raw, double err, TailMethod method, std::int64_t t) {
    return TailEstimate{std::clamp(raw, 0.0, 1.0), raw, err, method, tau_of(t)};
}

// A finite realized walk with its bottom statistics.
struct WalkPath {
    std::vector<signed char> steps;
    std::vector<std::int64_t> partial_sums;  // S_0 = 0 first
    std::int64_t bottom = 0;
    std::int64_t last_bottom_time = 0;

    static WalkPath from_steps(std::vector<signed char> steps_) {
        WalkPath path;
        path.steps = std::move(steps_);
        path.partial_sums.reserve(path.steps.size() + 1);
        path.partial_sums.push_back(0);
        std::int64_t s = 0;
        for (std::size_t i = 0; i < path.steps.size(); ++i) {
            const signed char z = path.steps[i];
            if (z != 1 && z != -1) throw DomainError("WalkPath: steps must be +/-1");
            s += z;
            path.partial_sums.push_back(s);
            if (s < path.bottom) {
                path.bottom = s;
                path.last_bottom_time = static_cast<std::int64_t>(i) + 1;
            } else if (s == path.bottom) {
                path.last_bottom_time = static_cast<std::int64_t>(i) + 1;
            }
        }
        return path;
    }
};

struct SimResult {
    std::int64_t T = 0;
    std::int64_t steps = 0;
    std::int64_t bottom = 0;
};

// Smallest K with (q/p)^K <= safety_tol: once the walk sits K above its
// running minimum, the probability of ever revisiting the minimum is at most
// safety_tol (gambler's-ruin escape), so the recorded last visit is final
// except on an event of that probability.
inline std::int64_t escape_height(const BiasParams& params, double safety_tol) {
    if (!(safety_tol > 0.0 && safety_tol < 1.0))
        throw DomainError("escape_height: safety_tol must lie in (0, 1)");
    if (params.degenerate()) return 1;
    const std::int64_t k =
        static_cast<std::int64_t>(std::ceil(std::log(safety_tol) / std::log(params.q / params.p)));
    return std::max<std::int64_t>(k, 1);
}

// Sample T. Exact except on an event of probability <= safety_tol.
inline SimResult simulate_T(const BiasParams& params, double safety_tol, rng::Stream& stream) {
    const std::int64_t escape = escape_height(params, safety_tol);
    if (params.degenerate()) return SimResult{0, 0, 0};
    std::int64_t s = 0, bottom = 0, last_bottom = 0, t = 0;
    while (s - bottom < escape) {
        s += stream.bernoulli(params.p) ? 1 : -1;
        ++t;
        if (s <= bottom) {
            bottom = s;
            last_bottom = t;
        }
    }
    return SimResult{last_bottom, t, bottom};
}

// Same walk, but the realized path is kept (tests and small experiments).
inline WalkPath simulate_path(const BiasParams& params, double safety_tol, rng::Stream& stream) {
    const std::int64_t escape = escape_height(params, safety_tol);
    std::vector<signed char> steps;
    if (!params.degenerate()) {
        std::int64_t s = 0, bottom = 0;
        while (s - bottom < escape) {
            const signed char z = stream.bernoulli(params.p) ? 1 : -1;
            steps.push_back(z);
            s += z;
            bottom = std::min(bottom, s);
        }
    }
    return WalkPath::from_steps(std::move(steps));
}

// Distribution of T for k = 0..t_max from the triangular recursion
//   f(k, l) = q f(k-1, l-1) + p f(k-1, l+1),  f(0, 0) = p - q,
// with f zero outside 0 <= l <= k. P(T = k) = sum_l f(k, l) and
// P(T >= t) = 1 - sum_{k < t} P(T = k). Exact up to rounding; this is the
// independent oracle the closed forms are tested against.
struct DpTail {
    std::vector<double> pmf;       // P(T = k), k = 0..t_max
    std::vector<double> survival;  // P(T >= t), t = 0..t_max
};

// Full triangular table f[k][l] for 0 <= l <= k <= k_max, where f(k, l) is
// the probability that the walk's last bottom visit is at time k with bottom
// depth l. Materialized; intended for small k_max.
inline std::vector<std::vector<double>> dp_joint(const BiasParams& params, std::int64_t k_max) {
    require_interior(params, "dp_joint");
    if (k_max < 0) throw DomainError("dp_joint: k_max must be >= 0");
    std::vector<std::vector<double>> f;
    f.reserve(k_max + 1);
    f.push_back({params.p - params.q});
    for (std::int64_t k = 1; k <= k_max; ++k) {
        const auto& prev = f.back();
        std::vector<double> row(k + 1, 0.0);
        for (std::int64_t l = 0; l <= k; ++l) {
            const double from_below = l >= 1 && l - 1 < static_cast<std::int64_t>(prev.size())
                                          ? prev[l - 1]
                                          : 0.0;
            const double from_above =
                l + 1 < static_cast<std::int64_t>(prev.size()) ? prev[l + 1] : 0.0;
            row[l] = params.q * from_below + params.p * from_above;
        }
        f.push_back(std::move(row));
    }
    return f;
}

inline DpTail tail_dp_oracle(const BiasParams& params, std::int64_t t_max) {
    require_interior(params, "tail_dp_oracle");
    if (t_max < 0) throw DomainError("tail_dp_oracle: t_max must be >= 0");
    const double p = params.p, q = params.q;
    DpTail out;
    out.pmf.reserve(t_max + 1);
    out.survival.reserve(t_max + 1);
    std::vector<double> row{p - q}, next;
    stats::KahanSum mass;
    for (std::int64_t k = 0; k <= t_max; ++k) {
        stats::KahanSum pk;
        for (double f : row) pk += f;
        out.survival.push_back(1.0 - mass.value());
        out.pmf.push_back(pk.value());
        mass += pk.value();
        next.assign(row.size() + 1, 0.0);
        for (std::size_t l = 0; l <= row.size(); ++l) {
            const double from_below = l >= 1 ? row[l - 1] : 0.0;           // step down into l
            const double from_above = l + 1 < row.size() ? row[l + 1] : 0.0;  // step up into l
            next[l] = q * from_below + p * from_above;
        }
        row.swap(next);
    }
    return out;
}

// Exact tail. With x = pq, tau = floor((t+1)/2),
//   F1 = 2F1(1, tau + 1/2; tau + 2; 4x),  F2 = 2F1(2, tau + 3/2; tau + 3; 4x),
// the per-step masses pair up as P(T = 2k) = P(T = 2k-1), and summing the
// pairs gives
//   P(T >= t) = 2 (p-q) p x^tau C_tau [F1 + 4x w F2]      (t odd)
//   P(T >= t) =   (p-q) p x^tau C_tau [F1 + 8x w F2]      (t even)
// with w = (tau + 1/2)/(tau + 2). The prefactor is assembled in log space.
inline TailEstimate tail_exact(const BiasParams& params, std::int64_t t,
                               double tol = specfn::kDefaultTol) {
    require_interior(params, "tail_exact");
    if (t < 0) throw DomainError("tail_exact: t must be >= 0");
    const double p = params.p, q = params.q;
    const std::int64_t tau = tau_of(t);
    const double x = p * q;
    const double taud = static_cast<double>(tau);

    const specfn::SeriesValue f1 = specfn::hyp2f1(1.0, taud + 0.5, taud + 2.0, 4.0 * x, tol);
    const specfn::SeriesValue f2 = specfn::hyp2f1(2.0, taud + 1.5, taud + 3.0, 4.0 * x, tol);

    const double ln_prefactor =
        std::log(p - q) + std::log(p) + taud * std::log(x) + specfn::log_catalan(tau);
    const double prefactor = std::exp(ln_prefactor);
    const double parity = (t % 2 == 0) ? 1.0 : 2.0;
    const double w = 4.0 * x * (taud + 0.5) / (taud + 2.0);
    const double bracket = f1.value + (t % 2 == 0 ? 2.0 : 1.0) * w * f2.value;

    const double raw = parity * prefactor * bracket;
    const double err = parity * prefactor * (f1.truncation_bound + 2.0 * w * f2.truncation_bound) +
                       16.0 * std::numeric_limits<double>::epsilon() * std::abs(raw);
    TailEstimate est = make_estimate(raw, err, TailMethod::exact_series, t);
    est.tau = tau;
    return est;
}

// P(T >= t) <= (1 + sqrt 2)(4pq)^{t/2}; vacuous (> 1) for small t.
inline TailEstimate tail_upper_mgf(const BiasParams& params, std::int64_t t) {
    if (t < 0) throw DomainError("tail_upper_mgf: t must be >= 0");
    const double raw =
        t == 0 ? 1.0 + kSqrt2
               : (1.0 + kSqrt2) * std::pow(params.four_pq(), static_cast<double>(t) / 2.0);
    return make_estimate(raw, 0.0, TailMethod::mgf_bound, t);
}

inline double mgf_domain_max(const BiasParams& params) {
    return 0.5 * std::log(1.0 / params.four_pq());
}

// E[e^{sT}] = 2(p-q) / (1 + sqrt(1 - 4pq e^{2s}) - 2q e^s). The transform
// converges for every s up to (1/2) ln(1/(4pq)); negative s is admitted so
// derivative checks can difference through 0.
inline double mgf(const BiasParams& params, double s) {
    require_interior(params, "mgf");
    if (!(s <= mgf_domain_max(params)))
        throw DomainError("mgf: s beyond (1/2) ln(1/(4pq))");
    const double es = std::exp(s);
    const double inner = std::max(0.0, 1.0 - params.four_pq() * es * es);
    return 2.0 * params.drift() / (1.0 + std::sqrt(inner) - 2.0 * params.q * es);
}

struct Moments {
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;
};

// mu1 = q(3 - 4q)/(p-q)^2, mu2 = q(1 - 8p + 28p^2 - 16p^3)/(p-q)^4.
inline Moments moments(const BiasParams& params) {
    if (params.degenerate()) return Moments{};
    const double p = params.p, q = params.q, d = params.drift();
    const double mean = q * (3.0 - 4.0 * q) / (d * d);
    const double second = q * (1.0 + p * (-8.0 + p * (28.0 - 16.0 * p))) / (d * d * d * d);
    return Moments{mean, second, second - mean * mean};
}

// Lerch-transcendent surrogate for the tail's order of magnitude:
//   (p-q)(4pq)^tau [ Phi(4pq, 1/2, tau) + (1 - tau) Phi(4pq, 3/2, tau) ].
// Not a probability; only ratios against the exact tail are meaningful.
inline TailEstimate tail_asymptotic(const BiasParams& params, std::int64_t t,
                                    double tol = specfn::kDefaultTol) {
    require_interior(params, "tail_asymptotic");
    if (t < 1) throw DomainError("tail_asymptotic: t must be >= 1");
    const std::int64_t tau = tau_of(t);
    const double taud = static_cast<double>(tau);
    const double z = params.four_pq();
    const specfn::SeriesValue phi_half = specfn::lerch_phi(z, 0.5, taud, tol);
    const specfn::SeriesValue phi_three_half = specfn::lerch_phi(z, 1.5, taud, tol);
    const double geo = std::exp(taud * std::log(z));
    const double raw =
        params.drift() * geo * (phi_half.value + (1.0 - taud) * phi_three_half.value);
    const double err = params.drift() * geo *
                       (phi_half.truncation_bound +
                        std::abs(1.0 - taud) * phi_three_half.truncation_bound);
    TailEstimate est = make_estimate(raw, err, TailMethod::lerch_asymptotic, t);
    est.tau = tau;
    return est;
}

struct ElementaryBounds {
    double upper = 0.0;
    double lower = 0.0;
};

// Envelopes c_u (4pq)^{(t+1)/2} / ((p-q)^3 t^{3/2}) and
// c_l (p-q) (4pq)^{(t+1)/2} / t^{3/2}; constants are calibration parameters.
inline ElementaryBounds tail_elementary_bounds(const BiasParams& params, std::int64_t t,
                                               double upper_c = kElementaryUpperC,
                                               double lower_c = kElementaryLowerC) {
    require_interior(params, "tail_elementary_bounds");
    if (t < 1) throw DomainError("tail_elementary_bounds: t must be >= 1");
    const double d = params.drift();
    const double td = static_cast<double>(t);
    const double geo = std::exp(0.5 * (td + 1.0) * std::log(params.four_pq()));
    const double t32 = td * std::sqrt(td);
    return ElementaryBounds{upper_c * geo / (d * d * d * t32), lower_c * d * geo / t32};
}

}  // namespace corrline::walk
