// Command-line driver: walk tails and simulation, interval recovery and
// phantom scans, threshold/interval/PAC learning experiments, regression
// checks, and the full verification suite. Machine-readable records go to
// stdout (JSON lines or CSV), a short human summary goes to stderr.
//
// Exit codes: 0 success, 2 validation/usage error, 3 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "corrline/interval.hpp"
#include "corrline/learn.hpp"
#include "corrline/oracle.hpp"
#include "corrline/parallel.hpp"
#include "corrline/regress.hpp"
#include "corrline/rng.hpp"
#include "corrline/stats.hpp"
#include "corrline/verify.hpp"
#include "corrline/walk.hpp"

namespace walk = corrline::walk;
namespace interval = corrline::interval;
namespace learn = corrline::learn;
namespace regress = corrline::regress;
namespace verify = corrline::verify;
namespace par = corrline::par;
namespace rng = corrline::rng;
namespace stats = corrline::stats;

using ordered_json = nlohmann::ordered_json;

namespace {

// Writes one record per line, as a JSON object or as CSV with a header row
// (fixed column order = field order of the first record).
class Emitter {
  public:
    Emitter(const std::string& format, const std::string& out_path) : format_(format) {
        if (!out_path.empty()) {
            file_.open(out_path);
            if (!file_)
                throw corrline::ValidationError("cannot open output file: " + out_path);
        }
    }

    void emit(const ordered_json& record) {
        std::ostream& os = file_.is_open() ? file_ : std::cout;
        if (format_ == "json") {
            os << record.dump() << "\n";
            return;
        }
        if (!header_written_) {
            bool first = true;
            for (const auto& [key, value] : record.items()) {
                os << (first ? "" : ",") << key;
                first = false;
            }
            os << "\n";
            header_written_ = true;
        }
        bool first = true;
        for (const auto& [key, value] : record.items()) {
            os << (first ? "" : ",");
            if (value.is_string())
                os << value.get<std::string>();
            else
                os << value.dump();
            first = false;
        }
        os << "\n";
    }

  private:
    std::string format_;
    std::ofstream file_;
    bool header_written_ = false;
};

struct CommonOpts {
    std::uint64_t seed = 1;
    std::uint64_t trials = 10000;
    unsigned parallelism = 1;
    std::string format = "json";
    std::string out_path;

    void attach(CLI::App* cmd, bool with_trials = true) {
        cmd->add_option("--seed", seed, "Master seed");
        if (with_trials) cmd->add_option("--trials", trials, "Number of Monte Carlo trials");
        cmd->add_option("--parallelism", parallelism, "Worker threads")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--out", out_path, "Output path (default: stdout)");
    }

    Emitter emitter() const { return Emitter(format, out_path); }
};

std::string cells_to_string(const std::vector<learn::CutCell>& cells) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) ss << ';';
        ss << '(' << cells[i].lo << ',' << cells[i].hi << ']';
    }
    return ss.str();
}

std::string witnesses_to_string(const std::vector<interval::IntervalCandidate>& ws) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (i) ss << ';';
        ss << ws[i].iv.start << '-' << ws[i].iv.end;
    }
    return ss.str();
}

ordered_json summary_record(const interval::CorruptedSignal& signal,
                            const std::optional<interval::Interval>& ref) {
    const auto summary = interval::optimal_set_summary(signal, ref);
    ordered_json j;
    j["n"] = signal.n();
    j["max_score"] = summary.max_score;
    j["count"] = summary.count;
    if (summary.max_sym_diff) j["max_sym_diff"] = *summary.max_sym_diff;
    if (summary.phantom_exists) j["phantom"] = *summary.phantom_exists;
    j["witnesses"] = witnesses_to_string(summary.witness_examples);
    return j;
}

int run_walk_tail(const CommonOpts& opts, double p, std::int64_t t, std::int64_t t_max,
                  const std::string& method, double tol, double safety_tol) {
    const walk::BiasParams params(p);
    if (t_max < t) t_max = t;
    Emitter emitter = opts.emitter();

    auto base_record = [&](std::int64_t ti) {
        ordered_json j;
        j["p"] = p;
        j["t"] = ti;
        j["tau"] = walk::tau_of(ti);
        return j;
    };
    auto estimate_record = [&](std::int64_t ti, const walk::TailEstimate& est) {
        ordered_json j = base_record(ti);
        j["probability"] = est.probability;
        j["raw_value"] = est.raw_value;
        j["error_bound"] = est.error_bound;
        j["method"] = walk::to_string(est.method);
        return j;
    };

    if (method == "exact") {
        for (std::int64_t ti = t; ti <= t_max; ++ti)
            emitter.emit(estimate_record(ti, walk::tail_exact(params, ti, tol)));
    } else if (method == "dp") {
        const auto dp = walk::tail_dp_oracle(params, t_max);
        for (std::int64_t ti = t; ti <= t_max; ++ti) {
            walk::TailEstimate est = walk::make_estimate(dp.survival[ti], 0.0,
                                                         walk::TailMethod::dp_oracle, ti);
            emitter.emit(estimate_record(ti, est));
        }
    } else if (method == "mgf") {
        for (std::int64_t ti = t; ti <= t_max; ++ti)
            emitter.emit(estimate_record(ti, walk::tail_upper_mgf(params, ti)));
    } else if (method == "asymptotic") {
        for (std::int64_t ti = t; ti <= t_max; ++ti)
            emitter.emit(estimate_record(ti, walk::tail_asymptotic(params, ti, tol)));
    } else if (method == "elementary") {
        for (std::int64_t ti = t; ti <= t_max; ++ti) {
            const auto bounds = walk::tail_elementary_bounds(params, ti);
            ordered_json j = base_record(ti);
            j["upper"] = bounds.upper;
            j["lower"] = bounds.lower;
            j["method"] = "elementary_bounds";
            emitter.emit(j);
        }
    } else {  // mc
        std::vector<std::uint64_t> at_least(t_max + 1, 0);
        par::run_trials<std::int64_t>(
            opts.trials, opts.parallelism, opts.seed,
            [&](std::uint64_t, rng::Stream& stream) {
                return walk::simulate_T(params, safety_tol, stream).T;
            },
            [&](std::uint64_t, const std::vector<std::int64_t>& chunk) {
                for (std::int64_t value : chunk)
                    for (std::int64_t ti = 0; ti <= t_max && ti <= value; ++ti) ++at_least[ti];
            });
        for (std::int64_t ti = t; ti <= t_max; ++ti) {
            const double freq =
                static_cast<double>(at_least[ti]) / static_cast<double>(opts.trials);
            const double se =
                std::sqrt(freq * (1.0 - freq) / static_cast<double>(opts.trials));
            walk::TailEstimate est =
                walk::make_estimate(freq, se, walk::TailMethod::monte_carlo, ti);
            ordered_json j = estimate_record(ti, est);
            j["trials"] = opts.trials;
            emitter.emit(j);
        }
    }
    std::cerr << "walk tail: p=" << p << " t=" << t << ".." << t_max << " method=" << method
              << "\n";
    return 0;
}

int run_walk_simulate(const CommonOpts& opts, double p, double safety_tol, bool emit_trials) {
    const walk::BiasParams params(p);
    Emitter emitter = opts.emitter();
    stats::Welford t_stats, steps_stats;
    struct Rec {
        std::int64_t T, steps, bottom;
    };
    par::run_trials<Rec>(
        opts.trials, opts.parallelism, opts.seed,
        [&](std::uint64_t, rng::Stream& stream) {
            const auto r = walk::simulate_T(params, safety_tol, stream);
            return Rec{r.T, r.steps, r.bottom};
        },
        [&](std::uint64_t chunk_index, const std::vector<Rec>& chunk) {
            std::uint64_t trial = chunk_index * par::kChunkSize;
            for (const Rec& r : chunk) {
                t_stats.add(static_cast<double>(r.T));
                steps_stats.add(static_cast<double>(r.steps));
                if (emit_trials) {
                    ordered_json j;
                    j["trial"] = trial;
                    j["T"] = r.T;
                    j["steps"] = r.steps;
                    j["bottom"] = r.bottom;
                    emitter.emit(j);
                }
                ++trial;
            }
        });
    const auto closed = walk::moments(params);
    if (!emit_trials) {
        ordered_json j;
        j["p"] = p;
        j["trials"] = opts.trials;
        j["safety_tol"] = safety_tol;
        j["seed"] = opts.seed;
        j["mean_T"] = t_stats.mean();
        j["var_T"] = t_stats.variance();
        j["se_mean"] = t_stats.std_error();
        j["mean_steps"] = steps_stats.mean();
        j["expected_mean"] = closed.mean;
        j["expected_variance"] = closed.variance;
        emitter.emit(j);
    }
    std::cerr << "walk simulate: p=" << p << " trials=" << opts.trials
              << " mean_T=" << t_stats.mean() << " (expected " << closed.mean << ")\n";
    return 0;
}

int run_walk_moments(const CommonOpts& opts, double p) {
    const auto m = walk::moments(walk::BiasParams(p));
    Emitter emitter = opts.emitter();
    ordered_json j;
    j["p"] = p;
    j["mean"] = m.mean;
    j["second_moment"] = m.second_moment;
    j["variance"] = m.variance;
    emitter.emit(j);
    std::cerr << "walk moments: p=" << p << " mean=" << m.mean << " var=" << m.variance << "\n";
    return 0;
}

int run_interval_recover(const CommonOpts& opts, const std::string& signal_path,
                         const std::string& export_path, std::int64_t n, std::int64_t start,
                         std::int64_t end, double q, bool emit_trials) {
    Emitter emitter = opts.emitter();
    if (!signal_path.empty()) {
        const auto signal = interval::load_signal_file(signal_path);
        std::optional<interval::Interval> ref;
        if (start > 0) ref = interval::Interval{start, end};
        emitter.emit(summary_record(signal, ref));
        std::cerr << "interval recover: analyzed " << signal_path << "\n";
        return 0;
    }

    const interval::PlantedInstance instance(n, interval::Interval{start, end}, q);
    if (!export_path.empty()) {
        rng::Stream stream = rng::derive_stream(opts.seed, 0);
        const auto signal = interval::corrupt(instance, stream);
        interval::save_signal_file(export_path, signal);
        emitter.emit(summary_record(signal, instance.planted));
        std::cerr << "interval recover: wrote " << export_path << "\n";
        return 0;
    }

    stats::Frequency phantom_freq;
    stats::Welford sym_stats, score_stats;
    std::int64_t worst_sym = 0;
    struct Rec {
        std::int64_t max_score, sym;
        std::uint64_t count;
        bool phantom;
    };
    par::run_trials<Rec>(
        opts.trials, opts.parallelism, opts.seed,
        [&](std::uint64_t, rng::Stream& stream) {
            const auto signal = interval::corrupt(instance, stream);
            const auto summary = interval::optimal_set_summary(signal, instance.planted);
            return Rec{summary.max_score, *summary.max_sym_diff, summary.count,
                       *summary.phantom_exists};
        },
        [&](std::uint64_t chunk_index, const std::vector<Rec>& chunk) {
            std::uint64_t trial = chunk_index * par::kChunkSize;
            for (const Rec& r : chunk) {
                phantom_freq.add(r.phantom);
                sym_stats.add(static_cast<double>(r.sym));
                score_stats.add(static_cast<double>(r.max_score));
                worst_sym = std::max(worst_sym, r.sym);
                if (emit_trials) {
                    ordered_json j;
                    j["trial"] = trial;
                    j["max_score"] = r.max_score;
                    j["count"] = r.count;
                    j["max_sym_diff"] = r.sym;
                    j["phantom"] = r.phantom;
                    emitter.emit(j);
                }
                ++trial;
            }
        });
    if (!emit_trials) {
        ordered_json j;
        j["n"] = n;
        j["start"] = start;
        j["end"] = end;
        j["q"] = q;
        j["trials"] = opts.trials;
        j["seed"] = opts.seed;
        j["phantom_freq"] = phantom_freq.rate();
        j["phantom_se"] = phantom_freq.std_error();
        j["mean_max_score"] = score_stats.mean();
        j["mean_max_sym_diff"] = sym_stats.mean();
        j["worst_max_sym_diff"] = worst_sym;
        emitter.emit(j);
    }
    std::cerr << "interval recover: phantom_freq=" << phantom_freq.rate()
              << " mean_sym=" << sym_stats.mean() << "\n";
    return 0;
}

int run_phantom_scan(const CommonOpts& opts, std::int64_t n, double q,
                     std::vector<std::int64_t> lens) {
    const walk::BiasParams params(1.0 - q);
    const auto thresholds = interval::phantom_thresholds(n, params);
    if (lens.empty()) {
        lens = {static_cast<std::int64_t>(std::floor(0.5 * thresholds.lower_len)),
                static_cast<std::int64_t>(std::floor(thresholds.lower_len)),
                static_cast<std::int64_t>(std::round((thresholds.lower_len + thresholds.upper_len) / 2.0)),
                static_cast<std::int64_t>(std::ceil(thresholds.upper_len)),
                static_cast<std::int64_t>(std::ceil(1.5 * thresholds.upper_len))};
    }
    Emitter emitter = opts.emitter();
    int slot = 0;
    for (std::int64_t len : lens) {
        if (len < 1 || len > n) throw corrline::ValidationError("phantom-scan: length outside 1..n");
        stats::Frequency freq;
        par::run_trials<bool>(
            opts.trials, opts.parallelism, rng::derive_seed(opts.seed, slot),
            [&](std::uint64_t, rng::Stream& stream) {
                const std::int64_t s =
                    1 + static_cast<std::int64_t>(stream.next_u64() % (n - len + 1));
                const interval::Interval ref{s, s + len - 1};
                const auto signal =
                    interval::corrupt(interval::PlantedInstance(n, ref, q), stream);
                const auto disjoint = interval::best_disjoint(signal, ref);
                return disjoint && disjoint->score == interval::max_score(signal);
            },
            [&](std::uint64_t, const std::vector<bool>& chunk) {
                for (bool hit : chunk) freq.add(hit);
            });
        ordered_json j;
        j["n"] = n;
        j["q"] = q;
        j["len"] = len;
        j["trials"] = opts.trials;
        j["phantom_freq"] = freq.rate();
        j["phantom_se"] = freq.std_error();
        j["upper_bound"] = std::min(1.0, interval::phantom_prob_upper(n, len, params));
        j["upper_len_threshold"] = thresholds.upper_len;
        j["lower_len_threshold"] = thresholds.lower_len;
        emitter.emit(j);
        std::cerr << "phantom-scan: len=" << len << " freq=" << freq.rate() << "\n";
        ++slot;
    }
    return 0;
}

int run_learn_threshold(const CommonOpts& opts, const std::string& sample_path, double a_star,
                        double eta, double epsilon, double delta, std::int64_t m_override) {
    Emitter emitter = opts.emitter();
    if (!sample_path.empty()) {
        const auto sample = learn::load_sample_file(sample_path);
        const auto erm = learn::erm_threshold(sample);
        ordered_json j;
        j["m"] = sample.size();
        j["mistakes"] = erm.mistakes;
        j["optimal_cells"] = cells_to_string(erm.optimal_cells);
        j["worst_deviation"] = erm.worst_deviation(a_star);
        emitter.emit(j);
        std::cerr << "learn threshold: " << sample_path << " mistakes=" << erm.mistakes << "\n";
        return 0;
    }
    const learn::ThresholdScenario scenario(a_star, eta, epsilon, delta);
    const std::int64_t m =
        m_override > 0 ? m_override : learn::sample_complexity_threshold(eta, delta);
    const learn::PointDesign design = learn::PointDesign::banded(m);
    stats::Frequency success;
    stats::Welford right_counts;
    par::run_trials<learn::ThresholdTrial>(
        opts.trials, opts.parallelism, opts.seed,
        [&](std::uint64_t, rng::Stream& stream) {
            return learn::run_threshold_trial(scenario, design, stream);
        },
        [&](std::uint64_t, const std::vector<learn::ThresholdTrial>& chunk) {
            for (const auto& trial : chunk) {
                success.add(trial.success);
                right_counts.add(static_cast<double>(trial.right_count));
            }
        });
    ordered_json j;
    j["eta"] = eta;
    j["epsilon"] = epsilon;
    j["delta"] = delta;
    j["m_per_band"] = m;
    j["trials"] = opts.trials;
    j["success_freq"] = success.rate();
    j["success_se"] = success.std_error();
    j["mean_right_count"] = right_counts.mean();
    emitter.emit(j);
    std::cerr << "learn threshold: m=" << m << " success=" << success.rate() << "\n";
    return 0;
}

int run_learn_interval(const CommonOpts& opts, double a_star, double b_star, double eta,
                       double epsilon, double delta, std::int64_t m_override) {
    const learn::IntervalScenario scenario(a_star, b_star, eta, epsilon, delta);
    const std::int64_t m =
        m_override > 0 ? m_override : learn::sample_complexity_interval(eta, delta);
    stats::Frequency success;
    par::run_trials<bool>(
        opts.trials, opts.parallelism, opts.seed,
        [&](std::uint64_t, rng::Stream& stream) {
            return learn::run_interval_trial(scenario, m, stream).success;
        },
        [&](std::uint64_t, const std::vector<bool>& chunk) {
            for (bool hit : chunk) success.add(hit);
        });
    Emitter emitter = opts.emitter();
    ordered_json j;
    j["eta"] = eta;
    j["epsilon"] = epsilon;
    j["delta"] = delta;
    j["m_per_band"] = m;
    j["trials"] = opts.trials;
    j["success_freq"] = success.rate();
    j["success_se"] = success.std_error();
    emitter.emit(j);
    std::cerr << "learn interval: m=" << m << " success=" << success.rate() << "\n";
    return 0;
}

int run_learn_pac(const CommonOpts& opts, double a_star, double eta, double epsilon, double delta,
                  std::int64_t m_override) {
    const learn::ThresholdScenario scenario(a_star, eta, epsilon, delta);
    const std::int64_t m =
        m_override > 0 ? m_override : learn::sample_complexity_pac(eta, epsilon, delta);
    stats::Frequency success;
    stats::Welford errors;
    par::run_trials<learn::PacTrial>(
        opts.trials, opts.parallelism, opts.seed,
        [&](std::uint64_t, rng::Stream& stream) {
            return learn::run_pac_uniform(scenario, m, stream);
        },
        [&](std::uint64_t, const std::vector<learn::PacTrial>& chunk) {
            for (const auto& trial : chunk) {
                success.add(trial.success);
                errors.add(trial.error);
            }
        });
    Emitter emitter = opts.emitter();
    ordered_json j;
    j["eta"] = eta;
    j["epsilon"] = epsilon;
    j["delta"] = delta;
    j["m"] = m;
    j["trials"] = opts.trials;
    j["success_freq"] = success.rate();
    j["success_se"] = success.std_error();
    j["mean_error"] = errors.mean();
    emitter.emit(j);
    std::cerr << "learn pac: m=" << m << " success=" << success.rate() << "\n";
    return 0;
}

int run_regress(const CommonOpts& opts, const std::string& design_path, std::int64_t rows,
                std::int64_t cols, double cond, double eta, std::uint64_t draws) {
    const regress::Matrix x = design_path.empty()
                                  ? regress::random_design(rows, cols, opts.seed, cond)
                                  : regress::load_csv_file(design_path);
    const regress::Vector w_true = regress::Vector::Ones(x.cols());
    const regress::Vector y0 = x * w_true;
    const double expected = regress::expected_error(x, eta);
    const auto check = regress::adversarial_design_check(x, eta);
    stats::Welford err;
    par::run_trials<double>(
        draws, opts.parallelism, rng::derive_seed(opts.seed, 1),
        [&](std::uint64_t, rng::Stream& stream) {
            regress::Vector y = y0;
            for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += eta * stream.normal();
            return (regress::ols_fit(x, y) - w_true).squaredNorm();
        },
        [&](std::uint64_t, const std::vector<double>& chunk) {
            for (double v : chunk) err.add(v);
        });
    Emitter emitter = opts.emitter();
    ordered_json j;
    j["rows"] = x.rows();
    j["cols"] = x.cols();
    j["eta"] = eta;
    j["draws"] = draws;
    j["expected_error"] = expected;
    j["empirical_error"] = err.mean();
    j["rel_diff"] = expected > 0 ? std::abs(err.mean() / expected - 1.0) : 0.0;
    j["sigma_min"] = check.sigma_min;
    j["qualifies"] = check.qualifies;
    j["epsilon"] = check.epsilon;
    j["delta"] = check.delta;
    emitter.emit(j);
    std::cerr << "regress: expected=" << expected << " empirical=" << err.mean() << "\n";
    return 0;
}

int run_verify(const CommonOpts& opts, std::uint64_t trials_cap) {
    verify::VerifyConfig cfg;
    cfg.seed = opts.seed;
    cfg.parallelism = opts.parallelism;
    cfg.trials_cap = trials_cap;
    Emitter emitter = opts.emitter();
    bool all_pass = true;
    for (const auto& result : verify::run_all(cfg)) {
        ordered_json j;
        j["criterion"] = result.id;
        j["name"] = result.name;
        j["pass"] = result.pass;
        for (const auto& [key, value] : result.metrics) j[key] = value;
        if (!result.note.empty()) j["note"] = result.note;
        emitter.emit(j);
        std::cerr << "[" << (result.id < 10 ? " " : "") << result.id << "] "
                  << (result.pass ? "PASS" : "FAIL") << " " << result.name;
        if (!result.pass) std::cerr << " -- " << result.note;
        std::cerr << "\n";
        all_pass = all_pass && result.pass;
    }
    std::cerr << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corrupted processes on the integer line: walks, intervals, learning"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value config file; CLI flags take precedence");

    int exit_code = 0;

    // walk
    auto* walk_cmd = app.add_subcommand("walk", "Biased random walk analytics");
    walk_cmd->require_subcommand(1);
    {
        auto* tail = walk_cmd->add_subcommand("tail", "P(T >= t) by the chosen method")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto p = std::make_shared<double>(0.75);
        auto t = std::make_shared<std::int64_t>(0);
        auto t_max = std::make_shared<std::int64_t>(-1);
        auto method = std::make_shared<std::string>("exact");
        auto tol = std::make_shared<double>(corrline::specfn::kDefaultTol);
        auto safety = std::make_shared<double>(1e-9);
        tail->add_option("--p", *p, "Up-step probability")->required();
        tail->add_option("--t", *t, "Tail index")->required();
        tail->add_option("--t-max", *t_max, "Sweep up to this t (inclusive)");
        tail->add_option("--method", *method, "Evaluation method")
            ->check(CLI::IsMember({"exact", "dp", "mgf", "asymptotic", "elementary", "mc"}));
        tail->add_option("--tol", *tol, "Series tolerance");
        tail->add_option("--safety-tol", *safety, "Simulation stopping certificate");
        opts->attach(tail);
        auto ran_once = std::make_shared<bool>(false);
        tail->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true;
            exit_code = run_walk_tail(*opts, *p, *t, *t_max, *method, *tol, *safety);
        });
    }
    {
        auto* simulate = walk_cmd->add_subcommand("simulate", "Sample T and compare moments")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto p = std::make_shared<double>(0.75);
        auto safety = std::make_shared<double>(1e-9);
        auto emit_trials = std::make_shared<bool>(false);
        simulate->add_option("--p", *p, "Up-step probability")->required();
        simulate->add_option("--safety-tol", *safety, "Simulation stopping certificate");
        simulate->add_flag("--emit-trials", *emit_trials, "One record per trial");
        opts->attach(simulate);
        auto ran_once = std::make_shared<bool>(false);
        simulate->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true;
            exit_code = run_walk_simulate(*opts, *p, *safety, *emit_trials);
        });
    }
    {
        auto* moments = walk_cmd->add_subcommand("moments", "Closed-form mean and variance of T")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto p = std::make_shared<double>(0.75);
        moments->add_option("--p", *p, "Up-step probability")->required();
        opts->attach(moments, /*with_trials=*/false);
        auto ran_once = std::make_shared<bool>(false);
        moments->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true; exit_code = run_walk_moments(*opts, *p); });
    }

    // interval
    auto* interval_cmd = app.add_subcommand("interval", "Corrupted-interval recovery");
    interval_cmd->require_subcommand(1);
    {
        auto* recover = interval_cmd->add_subcommand(
            "recover", "Optimal-set summaries for planted or imported signals")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto signal_path = std::make_shared<std::string>();
        auto export_path = std::make_shared<std::string>();
        auto n = std::make_shared<std::int64_t>(1000);
        auto start = std::make_shared<std::int64_t>(0);
        auto end = std::make_shared<std::int64_t>(0);
        auto q = std::make_shared<double>(0.25);
        auto emit_trials = std::make_shared<bool>(false);
        recover->add_option("--signal", *signal_path, "Analyze a signal file instead of sampling");
        recover->add_option("--export-signal", *export_path, "Write one corrupted signal");
        recover->add_option("--n", *n, "Line length");
        recover->add_option("--start", *start, "Planted interval start (1-based)");
        recover->add_option("--end", *end, "Planted interval end (inclusive)");
        recover->add_option("--q", *q, "Flip probability, in [0, 1/2)");
        recover->add_flag("--emit-trials", *emit_trials, "One record per trial");
        opts->attach(recover);
        auto ran_once = std::make_shared<bool>(false);
        recover->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true;
            exit_code = run_interval_recover(*opts, *signal_path, *export_path, *n, *start, *end,
                                             *q, *emit_trials);
        });
    }
    {
        auto* scan = interval_cmd->add_subcommand(
            "phantom-scan", "Phantom frequency across planted lengths")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto n = std::make_shared<std::int64_t>(100000);
        auto q = std::make_shared<double>(0.25);
        auto lens = std::make_shared<std::vector<std::int64_t>>();
        scan->add_option("--n", *n, "Line length");
        scan->add_option("--q", *q, "Flip probability, in [0, 1/2)");
        scan->add_option("--lens", *lens, "Planted lengths (default: around the thresholds)")
            ->delimiter(',');
        opts->attach(scan);
        auto ran_once = std::make_shared<bool>(false);
        scan->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true; exit_code = run_phantom_scan(*opts, *n, *q, *lens); });
    }

    // learn
    auto* learn_cmd = app.add_subcommand("learn", "ERM learning under label noise");
    learn_cmd->require_subcommand(1);
    {
        auto* threshold = learn_cmd->add_subcommand("threshold", "Adversarial-design thresholds")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto sample_path = std::make_shared<std::string>();
        auto a_star = std::make_shared<double>(0.0);
        auto eta = std::make_shared<double>(0.25);
        auto epsilon = std::make_shared<double>(0.1);
        auto delta = std::make_shared<double>(0.05);
        auto m = std::make_shared<std::int64_t>(0);
        threshold->add_option("--sample", *sample_path, "Run ERM on a two-column sample file");
        threshold->add_option("--a-star", *a_star, "Target threshold");
        threshold->add_option("--eta", *eta, "Label flip probability");
        threshold->add_option("--epsilon", *epsilon, "Accuracy target");
        threshold->add_option("--delta", *delta, "Failure probability target");
        threshold->add_option("--m", *m, "Points per band (default: calculator)");
        opts->attach(threshold);
        auto ran_once = std::make_shared<bool>(false);
        threshold->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true;
            exit_code = run_learn_threshold(*opts, *sample_path, *a_star, *eta, *epsilon, *delta,
                                            *m);
        });
    }
    {
        auto* iv = learn_cmd->add_subcommand("interval", "Adversarial-design intervals")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto a_star = std::make_shared<double>(0.0);
        auto b_star = std::make_shared<double>(1.0);
        auto eta = std::make_shared<double>(0.25);
        auto epsilon = std::make_shared<double>(0.1);
        auto delta = std::make_shared<double>(0.05);
        auto m = std::make_shared<std::int64_t>(0);
        iv->add_option("--a-star", *a_star, "Target left endpoint");
        iv->add_option("--b-star", *b_star, "Target right endpoint");
        iv->add_option("--eta", *eta, "Label flip probability");
        iv->add_option("--epsilon", *epsilon, "Accuracy target");
        iv->add_option("--delta", *delta, "Failure probability target");
        iv->add_option("--m", *m, "Points per band (default: calculator)");
        opts->attach(iv);
        auto ran_once = std::make_shared<bool>(false);
        iv->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true;
            exit_code = run_learn_interval(*opts, *a_star, *b_star, *eta, *epsilon, *delta, *m);
        });
    }
    {
        auto* pac = learn_cmd->add_subcommand("pac", "Uniform-distribution PAC experiment")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto a_star = std::make_shared<double>(0.35);
        auto eta = std::make_shared<double>(0.25);
        auto epsilon = std::make_shared<double>(0.1);
        auto delta = std::make_shared<double>(0.1);
        auto m = std::make_shared<std::int64_t>(0);
        pac->add_option("--a-star", *a_star, "Target threshold in [0, 1]");
        pac->add_option("--eta", *eta, "Label flip probability");
        pac->add_option("--epsilon", *epsilon, "Accuracy target");
        pac->add_option("--delta", *delta, "Failure probability target");
        pac->add_option("--m", *m, "Sample size (default: calculator)");
        opts->attach(pac);
        auto ran_once = std::make_shared<bool>(false);
        pac->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true;
            exit_code = run_learn_pac(*opts, *a_star, *eta, *epsilon, *delta, *m);
        });
    }

    // regress
    {
        auto* reg = app.add_subcommand("regress", "OLS error identity and design check")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto design_path = std::make_shared<std::string>();
        auto rows = std::make_shared<std::int64_t>(100);
        auto cols = std::make_shared<std::int64_t>(4);
        auto cond = std::make_shared<double>(1.0);
        auto eta = std::make_shared<double>(0.5);
        auto draws = std::make_shared<std::uint64_t>(10000);
        reg->add_option("--design", *design_path, "CSV design matrix (header optional)");
        reg->add_option("--rows", *rows, "Generated design rows");
        reg->add_option("--cols", *cols, "Generated design columns");
        reg->add_option("--cond", *cond, "Generated design condition number");
        reg->add_option("--eta", *eta, "Gaussian label noise scale");
        reg->add_option("--draws", *draws, "Noise draws");
        opts->attach(reg, /*with_trials=*/false);
        auto ran_once = std::make_shared<bool>(false);
        reg->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true;
            exit_code = run_regress(*opts, *design_path, *rows, *cols, *cond, *eta, *draws);
        });
    }

    // verify
    {
        auto* verify_cmd = app.add_subcommand("verify", "Verification suites");
        verify_cmd->require_subcommand(1);
        auto* all = verify_cmd->add_subcommand("all", "Run every acceptance check")->configurable();
        auto opts = std::make_shared<CommonOpts>();
        auto cap = std::make_shared<std::uint64_t>(0);
        opts->seed = 42;
        opts->parallelism = std::max(1u, std::thread::hardware_concurrency());
        all->add_option("--seed", opts->seed, "Master seed");
        all->add_option("--trials", *cap, "Cap Monte Carlo trial counts (0 = defaults)");
        all->add_option("--parallelism", opts->parallelism, "Worker threads")
            ->check(CLI::PositiveNumber);
        all->add_option("--format", opts->format, "Output format")
            ->check(CLI::IsMember({"json", "csv"}));
        all->add_option("--out", opts->out_path, "Output path (default: stdout)");
        auto ran_once = std::make_shared<bool>(false);
        all->callback([=, &exit_code] {
            if (*ran_once) return;
            *ran_once = true; exit_code = run_verify(*opts, *cap); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const corrline::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const corrline::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const corrline::SingularDesign& e) {
        std::cerr << "singular design: " << e.what() << "\n";
        return 2;
    } catch (const corrline::specfn::NonConvergence& e) {
        std::cerr << "series did not converge: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
