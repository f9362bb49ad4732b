#include "topk/experiment.hpp"

#include "topk/dataset.hpp"
#include "topk/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace topk {

namespace fs = std::filesystem;

namespace {

struct Job {
    std::size_t dataset = 0;  // index into the dataset list, synthetic last
    std::size_t k = 0;
    std::size_t cap = 0;
    std::size_t policy = 0;
    std::size_t trial = 0;
};

std::size_t choose(std::size_t n, std::size_t k)
{
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

// Smallest n with C(n, k) >= m, never below the configured count.
std::size_t synthetic_size(std::size_t configured, std::size_t k, std::size_t m)
{
    std::size_t n = std::max(configured, k);
    while (choose(n, k) < m) {
        ++n;
    }
    return n;
}

bool recall_bit(const Problem& p, const Candidate& winner)
{
    const auto& truth = *p.ground_truth;
    double best = exact_score(p.candidates.front(), p.spec, truth);
    for (const auto& c : p.candidates) {
        best = std::max(best, exact_score(c, p.spec, truth));
    }
    return score_geq(exact_score(winner, p.spec, truth), best, p.spec.grid_step());
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j)
{
    ExperimentConfig cfg;
    try {
        cfg.datasets = j.value("datasets", std::vector<std::string>{});
        if (j.contains("syntheticEntities")) {
            cfg.synthetic_entities = j.at("syntheticEntities").get<std::size_t>();
        }
        cfg.k_list = j.at("kList").get<std::vector<std::size_t>>();
        cfg.candidate_counts = j.at("candidateCountList").get<std::vector<std::size_t>>();
        for (const auto& p : j.at("policies")) {
            cfg.policies.push_back(parse_selector(p.get<std::string>()));
        }
        cfg.trials = j.value("trials", std::size_t{1});
        cfg.seed_base = j.value("seedBase", std::uint64_t{0});
        cfg.grid_step = j.value("gridStep", 0.5);
        cfg.threads = j.value("threads", std::size_t{0});
        cfg.timings = j.value("timings", true);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("experiment config: ") + e.what());
    }
    if (cfg.trials < 1) {
        throw ValidationError("experiment config: trials must be at least 1");
    }
    if (cfg.k_list.empty() || cfg.candidate_counts.empty() || cfg.policies.empty()) {
        throw ValidationError("experiment config: kList, candidateCountList and policies must be nonempty");
    }
    if (cfg.datasets.empty() && !cfg.synthetic_entities) {
        throw ValidationError("experiment config: no datasets and no synthetic instances");
    }
    return cfg;
}

std::vector<RunRow> run_experiment(const ExperimentConfig& cfg)
{
    std::vector<std::string> names;
    for (const auto& d : cfg.datasets) {
        names.push_back(fs::path(d).filename().string());
    }
    if (cfg.synthetic_entities) {
        names.emplace_back("synthetic");
    }

    std::vector<Job> jobs;
    for (std::size_t d = 0; d < names.size(); ++d) {
        for (auto k : cfg.k_list) {
            for (auto cap : cfg.candidate_counts) {
                for (std::size_t pol = 0; pol < cfg.policies.size(); ++pol) {
                    for (std::size_t t = 0; t < cfg.trials; ++t) {
                        jobs.push_back({d, k, cap, pol, t});
                    }
                }
            }
        }
    }

    auto build = [&](const Job& job) {
        if (job.dataset < cfg.datasets.size()) {
            return load_problem(cfg.datasets[job.dataset], job.k, job.cap);
        }
        const auto n = synthetic_size(*cfg.synthetic_entities, job.k, job.cap);
        const std::uint64_t seed = cfg.seed_base * 1'000'003ULL + job.k * 10'007ULL
                                   + job.cap * 101ULL + job.trial;
        return generate_synthetic(n, job.k, job.cap, seed, default_spec(cfg.grid_step));
    };

    std::vector<RunRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                const auto& job = jobs[i];
                const Problem p = build(job);
                TableOracle oracle(*p.ground_truth);
                const Policy policy{cfg.policies[job.policy], cfg.seed_base + job.trial};
                const auto start = std::chrono::steady_clock::now();
                const auto result = solve(p, policy, oracle);
                const auto wall = std::chrono::steady_clock::now() - start;
                RunRow row;
                row.dataset = names[job.dataset];
                row.k = job.k;
                row.m = p.candidates.size();
                row.policy = policy.selector;
                row.trial = job.trial;
                row.oracle_calls = result.oracle_calls;
                if (cfg.timings) {
                    row.wall_nanos =
                        std::chrono::duration_cast<std::chrono::nanoseconds>(wall).count();
                    row.nanos = result.nanos;
                }
                row.recall = recall_bit(p, result.winner);
                rows[i] = std::move(row);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = jobs.size();
            }
        }
    };
    std::size_t threads = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(jobs.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    // Jobs were generated in (dataset, k, cap, policy, trial) order already.
    return rows;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows)
{
    out << "dataset,k,M,policy,trial,oracleCalls,wallNanos,boundsNanos,probNanos,selectNanos,"
           "oracleNanos,recallBit\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.k << ',' << r.m << ',' << to_string(r.policy) << ','
            << r.trial << ',' << r.oracle_calls << ',' << r.wall_nanos << ',' << r.nanos.bounds
            << ',' << r.nanos.probability << ',' << r.nanos.selection << ',' << r.nanos.oracle
            << ',' << (r.recall ? 1 : 0) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<RunRow>& rows)
{
    struct Acc {
        std::size_t n = 0;
        double calls = 0.0;
        double wall = 0.0;
        double prob = 0.0;
        double recall = 0.0;
    };
    using Group = std::tuple<std::string, std::size_t, std::size_t>;
    std::map<Group, std::map<Selector, Acc>> groups;
    std::vector<Group> order;
    for (const auto& r : rows) {
        Group g{r.dataset, r.k, r.m};
        if (!groups.contains(g)) {
            order.push_back(g);
        }
        auto& a = groups[g][r.policy];
        ++a.n;
        a.calls += static_cast<double>(r.oracle_calls);
        a.wall += static_cast<double>(r.wall_nanos);
        a.prob += static_cast<double>(r.nanos.probability);
        a.recall += r.recall ? 1.0 : 0.0;
    }
    out << "dataset,k,M,policy,trials,meanOracleCalls,meanWallNanos,meanProbNanos,recall,"
           "randomCallsRatio,probNanosVsInd\n";
    for (const auto& g : order) {
        auto& by_policy = groups[g];
        auto mean = [](const Acc& a, double Acc::*field) { return a.*field / static_cast<double>(a.n); };
        for (const auto& [policy, a] : by_policy) {
            std::string random_ratio;
            if (auto it = by_policy.find(Selector::Random); it != by_policy.end() && a.calls > 0.0) {
                random_ratio = fmt(mean(it->second, &Acc::calls) / mean(a, &Acc::calls));
            }
            std::string prob_ratio;
            if (auto it = by_policy.find(Selector::EntrRedInd);
                it != by_policy.end() && it->second.prob > 0.0 && a.prob > 0.0) {
                prob_ratio = fmt(mean(a, &Acc::prob) / mean(it->second, &Acc::prob));
            }
            out << std::get<0>(g) << ',' << std::get<1>(g) << ',' << std::get<2>(g) << ','
                << to_string(policy) << ',' << a.n << ',' << fmt(mean(a, &Acc::calls)) << ','
                << fmt(mean(a, &Acc::wall)) << ',' << fmt(mean(a, &Acc::prob)) << ','
                << fmt(mean(a, &Acc::recall)) << ',' << random_ratio << ',' << prob_ratio << '\n';
        }
    }
}

std::vector<RunRow> run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir)
{
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw ValidationError("cannot create output directory " + out_dir.string() + ": "
                              + ec.message());
    }
    auto rows = run_experiment(cfg);
    auto open = [&](const char* name) {
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) {
            throw ValidationError("cannot write " + (out_dir / name).string());
        }
        return f;
    };
    auto runs = open("runs.csv");
    write_runs_csv(runs, rows);
    auto summary = open("summary.csv");
    write_summary_csv(summary, rows);
    if (!runs || !summary) {
        throw ValidationError("failed writing experiment output in " + out_dir.string());
    }
    return rows;
}

}  // namespace topk
