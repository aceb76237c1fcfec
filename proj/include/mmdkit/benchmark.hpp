#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "mmdkit/rng.hpp"
#include "mmdkit/synthetic.hpp"
#include "mmdkit/two_sample.hpp"
#include "mmdkit/types.hpp"

namespace mmdkit {

struct BenchmarkConfig {
    Scenario scenario = Scenario::mean_shift;
    std::vector<Index> dims = {1};
    std::vector<Index> sizes = {100};
    Index replicates = 100;
    std::vector<Method> methods = {Method::bootstrap};
    double shift = 1.0;  // mean offset (mean-shift) or stddev multiplier (var-shift)
    KernelChoice kernel = KernelChoice::median_gaussian();
    double alpha = 0.05;
    Index bootstrap_iters = 150;
    Index n_sim = 1000;
    std::uint64_t seed = 0;
};

struct BenchmarkRow {
    Scenario scenario;
    Index d = 0;
    Index m = 0;
    Method method;
    double reject_rate = 0.0;
    double mean_runtime_ms = 0.0;
};

/// One row per (scenario, d, m, method). All methods see the same replicate
/// data; every draw is derived from the master seed, so the reject-rate
/// columns are reproducible (runtimes are not).
inline std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& cfg) {
    if (cfg.replicates < 1) throw std::invalid_argument("run_benchmark: need replicates >= 1");
    if (cfg.dims.empty() || cfg.sizes.empty() || cfg.methods.empty())
        throw std::invalid_argument("run_benchmark: dims, sizes and methods must be nonempty");
    const Rng master(cfg.seed);
    std::vector<BenchmarkRow> rows;
    std::uint64_t cell = 0;
    for (Index d : cfg.dims) {
        for (Index m : cfg.sizes) {
            std::vector<BenchmarkRow> per_method;
            for (Method method : cfg.methods)
                per_method.push_back({cfg.scenario, d, m, method, 0.0, 0.0});
            for (Index rep = 0; rep < cfg.replicates; ++rep) {
                Rng data_rng = master.stream(cell * 1000003ULL + std::uint64_t(rep));
                auto [x, y] = scenario_pair(cfg.scenario, d, m, cfg.shift, data_rng);
                for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
                    TestConfig tc;
                    tc.method = cfg.methods[k];
                    tc.kernel = cfg.kernel;
                    tc.alpha = cfg.alpha;
                    tc.bootstrap_iters = cfg.bootstrap_iters;
                    tc.n_sim = cfg.n_sim;
                    tc.seed = data_rng.stream(k).seed();
                    const TestResult r = run_two_sample_test(x, y, tc);
                    per_method[k].reject_rate += r.reject ? 1.0 : 0.0;
                    per_method[k].mean_runtime_ms += r.runtime_ms;
                }
            }
            for (auto& row : per_method) {
                row.reject_rate /= double(cfg.replicates);
                row.mean_runtime_ms /= double(cfg.replicates);
                rows.push_back(row);
            }
            ++cell;
        }
    }
    return rows;
}

inline void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
    out << "scenario,d,m,method,reject_rate,mean_runtime_ms\n";
    for (const auto& r : rows)
        out << to_string(r.scenario) << ',' << r.d << ',' << r.m << ',' << to_string(r.method) << ','
            << r.reject_rate << ',' << r.mean_runtime_ms << '\n';
}

}  // namespace mmdkit
