// mmdkit command line: two-sample tests, HSIC independence test, attribute
// matching, witness export and a benchmark harness. JSON/CSV on stdout.
//
// Exit codes: 0 null accepted (or non-test command succeeded), 3 null
// rejected, 1 usage error, 2 data/computation error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmdkit/mmdkit.hpp"

using json = nlohmann::ordered_json;
using namespace mmdkit;

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitReject = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_sigma_word(const std::string& word, const char* flag) {
    if (word == "median") return -1.0;
    try {
        std::size_t pos = 0;
        const double v = std::stod(word, &pos);
        if (pos != word.size()) throw std::invalid_argument("trailing characters");
        if (!(v > 0.0)) throw std::invalid_argument("not positive");
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string(flag) + " must be 'median' or a positive number, got '" + word + "'");
    }
}

char parse_delim(const std::string& d) {
    if (d.size() != 1) throw UsageError("--delimiter must be a single character, got '" + d + "'");
    return d[0];
}

void check_alpha_flag(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie strictly between 0 and 1");
}

Method parse_method(const std::string& name) {
    if (name == "biased-bound") return Method::biased_bound;
    if (name == "hoeffding") return Method::hoeffding;
    if (name == "bootstrap") return Method::bootstrap;
    if (name == "pearson") return Method::pearson;
    if (name == "spectral") return Method::spectral;
    if (name == "linear") return Method::linear;
    throw UsageError("unknown method '" + name + "'");
}

// --kernel gaussian|laplace|linear|gram:FILE:SPLIT combined with --sigma.
struct KernelFlags {
    std::string kernel = "gaussian";
    std::string sigma = "median";
    std::optional<double> bound_k;
};

KernelChoice make_kernel_choice(const KernelFlags& kf) {
    if (kf.kernel.rfind("gram:", 0) == 0) {
        const std::string rest = kf.kernel.substr(5);
        const std::size_t colon = rest.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 >= rest.size())
            throw UsageError("--kernel gram form is gram:FILE:SPLIT");
        const std::string file = rest.substr(0, colon);
        Index split = 0;
        try {
            split = static_cast<Index>(std::stoll(rest.substr(colon + 1)));
        } catch (const std::exception&) {
            throw UsageError("--kernel gram:FILE:SPLIT needs an integer split");
        }
        Matrix aggregate = parse_gram_csv(file);
        return KernelChoice::precomputed(std::move(aggregate), split, kf.bound_k);
    }
    const double sigma = parse_sigma_word(kf.sigma, "--sigma");
    if (kf.kernel == "gaussian")
        return sigma > 0.0 ? KernelChoice::gaussian(sigma) : KernelChoice::median_gaussian();
    if (kf.kernel == "laplace")
        return sigma > 0.0 ? KernelChoice::laplace(sigma) : KernelChoice::median_laplace();
    if (kf.kernel == "linear") return KernelChoice::linear();
    throw UsageError("unknown kernel '" + kf.kernel + "'");
}

json kernel_json(const KernelSpec& spec) {
    json k;
    k["family"] = to_string(spec.family);
    if (spec.family == KernelFamily::gaussian || spec.family == KernelFamily::laplace)
        k["sigma"] = spec.sigma;
    else
        k["sigma"] = nullptr;
    if (spec.bound_k)
        k["bound_K"] = *spec.bound_k;
    else
        k["bound_K"] = nullptr;
    return k;
}

json result_json(const TestResult& res, const std::string& x_file, const std::string& y_file) {
    json j;
    j["statistic"] = res.statistic.value;
    j["statistic_type"] = to_string(res.statistic.kind);
    j["threshold"] = res.threshold;
    if (res.p_value)
        j["p_value"] = *res.p_value;
    else
        j["p_value"] = nullptr;
    j["alpha"] = 0.0;  // filled by caller
    j["reject"] = res.reject;
    j["method"] = to_string(res.method);
    j["kernel"] = kernel_json(res.kernel);
    j["m"] = res.m;
    j["n"] = res.n;
    j["seed"] = res.seed;
    j["runtime_ms"] = res.runtime_ms;
    j["version"] = version;
    j["inputs"] = {{"x", x_file.empty() ? json(nullptr) : json(x_file)},
                   {"y", y_file.empty() ? json(nullptr) : json(y_file)}};
    return j;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
        out << text << '\n';
        std::cout << text << '\n';
    }
}

int cmd_test(const std::string& x_file, const std::string& y_file, bool has_header, char delim,
             const std::string& method_name, const KernelFlags& kf, double alpha, Index b,
             Index n_sim, std::uint64_t seed, const std::string& stat_name,
             const std::string& out_path) {
    check_alpha_flag(alpha);
    if (b < 1) throw UsageError("--bootstrap-iters must be >= 1");
    if (n_sim < 1) throw UsageError("--n-sim must be >= 1");

    TestConfig cfg;
    cfg.method = parse_method(method_name);
    cfg.kernel = make_kernel_choice(kf);
    cfg.alpha = alpha;
    cfg.bootstrap_iters = b;
    cfg.n_sim = n_sim;
    cfg.seed = seed;
    if (stat_name == "mmd-u2")
        cfg.bootstrap_stat = StatKind::mmd_u_sq;
    else if (stat_name == "mmd-b")
        cfg.bootstrap_stat = StatKind::mmd_b;
    else
        throw UsageError("--bootstrap-stat must be mmd-u2 or mmd-b");

    const bool gram_input = cfg.kernel.family == KernelFamily::precomputed;
    if (!gram_input && (x_file.empty() || y_file.empty()))
        throw UsageError("--x and --y are required unless --kernel gram:FILE:SPLIT is used");

    TestResult res;
    if (gram_input && x_file.empty() && y_file.empty()) {
        const KernelSpec spec =
            KernelSpec::precomputed(cfg.kernel.gram, cfg.kernel.split, cfg.kernel.bound_k);
        res = run_two_sample_test(spec, cfg);
    } else {
        const CsvOptions opt{has_header, delim};
        const Sample x = parse_csv(x_file, opt);
        const Sample y = parse_csv(y_file, opt);
        res = run_two_sample_test(x, y, cfg);
    }

    json j = result_json(res, x_file, y_file);
    j["alpha"] = alpha;
    emit(j.dump(2), out_path);
    return res.reject ? kExitReject : kExitAccept;
}

int cmd_hsic(const std::string& x_file, const std::string& y_file, bool has_header, char delim,
             Index permutations, double alpha, std::uint64_t seed, const std::string& sigma_x,
             const std::string& sigma_y, const std::string& out_path) {
    check_alpha_flag(alpha);
    if (permutations < 1) throw UsageError("--permutations must be >= 1");
    const CsvOptions opt{has_header, delim};
    const Sample x = parse_csv(x_file, opt);
    const Sample y = parse_csv(y_file, opt);
    if (x.size() != y.size()) throw std::runtime_error("hsic: --x and --y must have the same row count");

    const double sx = parse_sigma_word(sigma_x, "--sigma-x");
    const double sy = parse_sigma_word(sigma_y, "--sigma-y");
    const KernelSpec kx = KernelSpec::gaussian(sx > 0.0 ? sx : median_heuristic(x));
    const KernelSpec ky = KernelSpec::gaussian(sy > 0.0 ? sy : median_heuristic(y));
    const GramBlocks gx = gram_blocks(kx, x, x);
    const GramBlocks gy = gram_blocks(ky, y, y);
    HsicInput inp(gx.kxx, gy.kxx);

    const TestResult res = hsic_permutation_test(inp, permutations, alpha, Rng(seed));

    json j;
    j["statistic"] = res.statistic.value;
    j["statistic_type"] = to_string(res.statistic.kind);
    j["threshold"] = res.threshold;
    j["p_value"] = *res.p_value;
    j["alpha"] = alpha;
    j["reject"] = res.reject;
    j["method"] = to_string(res.method);
    j["kernel"] = {{"family", "gaussian"}, {"sigma_x", kx.sigma}, {"sigma_y", ky.sigma}, {"bound_K", 1.0}};
    j["m"] = res.m;
    j["n"] = res.n;
    j["seed"] = seed;
    j["runtime_ms"] = res.runtime_ms;
    j["version"] = version;
    j["inputs"] = {{"x", x_file}, {"y", y_file}};
    emit(j.dump(2), out_path);
    return res.reject ? kExitReject : kExitAccept;
}

std::vector<Sample> columns_as_samples(const Sample& table) {
    std::vector<Sample> out;
    out.reserve(std::size_t(table.dim()));
    for (Index j = 0; j < table.dim(); ++j) out.emplace_back(Matrix(table.points.col(j)));
    return out;
}

int cmd_match(const std::string& a_file, const std::string& b_file, bool has_header, char delim,
              const std::string& stat_name, const KernelFlags& kf, const std::string& out_path) {
    const CsvOptions opt{has_header, delim};
    const Sample a_table = parse_csv(a_file, opt);
    const Sample b_table = parse_csv(b_file, opt);
    if (a_table.dim() != b_table.dim())
        throw std::runtime_error("match: tables must have the same number of attributes (columns)");

    MatchStat stat;
    if (stat_name == "mmd-u2")
        stat = MatchStat::mmd_u_sq;
    else if (stat_name == "mmd-b")
        stat = MatchStat::mmd_b;
    else
        throw UsageError("--stat must be mmd-u2 or mmd-b");

    TestConfig cfg;
    cfg.kernel = make_kernel_choice(kf);

    const std::vector<Sample> a = columns_as_samples(a_table);
    const std::vector<Sample> b = columns_as_samples(b_table);
    const Matrix c = cost_matrix(a, b, cfg, stat);
    const Assignment asg = hungarian(c);

    json j;
    j["method"] = "match";
    j["stat"] = stat_name;
    j["kernel"] = {{"family", kf.kernel}, {"sigma", kf.sigma == "median" ? json(nullptr) : json(std::stod(kf.sigma))}};
    j["n_attributes"] = c.rows();
    json perm = json::array();
    for (Index v : asg.perm) perm.push_back(v);
    j["assignment"] = perm;
    j["total_cost"] = asg.total_cost;
    json cm = json::array();
    for (Index i = 0; i < c.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < c.cols(); ++k) row.push_back(c(i, k));
        cm.push_back(row);
    }
    j["cost_matrix"] = cm;
    j["version"] = version;
    j["inputs"] = {{"a", a_file}, {"b", b_file}};
    emit(j.dump(2), out_path);
    return kExitAccept;
}

int cmd_witness(const std::string& x_file, const std::string& y_file, bool has_header, char delim,
                const KernelFlags& kf, const std::string& query_file, const std::string& grid,
                const std::string& out_path) {
    const CsvOptions opt{has_header, delim};
    const Sample x = parse_csv(x_file, opt);
    const Sample y = parse_csv(y_file, opt);

    Sample query;
    if (!query_file.empty()) {
        query = parse_csv(query_file, opt);
    } else if (!grid.empty()) {
        double lo = 0, hi = 0;
        long count = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(grid);
        if (!(is >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 2)
            throw UsageError("--grid form is LO:HI:COUNT with COUNT >= 2");
        if (x.dim() != 1) throw UsageError("--grid applies to 1-D samples only");
        Matrix pts(count, 1);
        for (long i = 0; i < count; ++i) pts(i, 0) = lo + (hi - lo) * double(i) / double(count - 1);
        query = Sample(std::move(pts));
    } else {
        throw UsageError("witness requires --query FILE or --grid LO:HI:COUNT");
    }

    const KernelChoice choice = make_kernel_choice(kf);
    const KernelSpec spec = resolve_kernel(choice, x, y);
    const std::vector<double> values = witness(x, y, spec, query);

    std::ostringstream out;
    for (Index j = 0; j < query.dim(); ++j) out << "t_" << j << ',';
    out << "witness\n";
    out.precision(17);
    for (Index i = 0; i < query.size(); ++i) {
        for (Index j = 0; j < query.dim(); ++j) out << query.points(i, j) << ',';
        out << values[std::size_t(i)] << '\n';
    }
    std::string text = out.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    emit(text, out_path);
    return kExitAccept;
}

int cmd_benchmark(const std::string& scenario_name, const std::vector<Index>& dims,
                  const std::vector<Index>& sizes, Index replicates,
                  const std::vector<std::string>& method_names, double shift,
                  const KernelFlags& kf, double alpha, Index b, Index n_sim, std::uint64_t seed,
                  const std::string& out_path) {
    check_alpha_flag(alpha);
    if (replicates < 1) throw UsageError("--replicates must be >= 1");
    BenchmarkConfig cfg;
    if (scenario_name == "mean-shift")
        cfg.scenario = Scenario::mean_shift;
    else if (scenario_name == "var-shift")
        cfg.scenario = Scenario::var_shift;
    else
        throw UsageError("--scenario must be mean-shift or var-shift");
    cfg.dims = dims;
    cfg.sizes = sizes;
    cfg.replicates = replicates;
    cfg.methods.clear();
    for (const auto& name : method_names) cfg.methods.push_back(parse_method(name));
    cfg.shift = shift;
    cfg.kernel = make_kernel_choice(kf);
    cfg.alpha = alpha;
    cfg.bootstrap_iters = b;
    cfg.n_sim = n_sim;
    cfg.seed = seed;

    const std::vector<BenchmarkRow> rows = run_benchmark(cfg);
    std::ostringstream out;
    write_benchmark_csv(out, rows);
    std::string text = out.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    emit(text, out_path);
    return kExitAccept;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel two-sample testing toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    // test
    auto* test = app.add_subcommand("test", "Two-sample test; exit 0 = accept, 3 = reject");
    std::string t_x, t_y, t_method = "bootstrap", t_stat = "mmd-u2", t_out, t_delim = ",";
    KernelFlags t_kf;
    bool t_header = false;
    double t_alpha = 0.05;
    Index t_b = 150, t_nsim = 1000;
    std::uint64_t t_seed = 0;
    double t_bound_k = 0.0;
    test->add_option("--x", t_x, "CSV of sample X (rows = observations)");
    test->add_option("--y", t_y, "CSV of sample Y");
    test->add_option("--method", t_method,
                     "biased-bound|hoeffding|bootstrap|pearson|spectral|linear (default bootstrap)");
    test->add_option("--kernel", t_kf.kernel, "gaussian|laplace|linear|gram:FILE:SPLIT");
    test->add_option("--sigma", t_kf.sigma, "median or a positive bandwidth (default median)");
    test->add_option("--alpha", t_alpha, "test level in (0,1), default 0.05");
    test->add_option("--bootstrap-iters", t_b, "bootstrap resamplings (default 150)");
    test->add_option("--n-sim", t_nsim, "spectral null simulations (default 1000)");
    test->add_option("--seed", t_seed, "RNG seed (default 0)");
    test->add_option("--bootstrap-stat", t_stat, "mmd-u2|mmd-b (default mmd-u2)");
    auto* bk = test->add_option("--bound-k", t_bound_k, "kernel bound K for precomputed Gram input");
    test->add_flag("--has-header", t_header, "skip the first CSV row");
    test->add_option("--delimiter", t_delim, "CSV field delimiter (default ',')");
    test->add_option("--out", t_out, "also write the JSON report to this file");

    // hsic
    auto* hsic = app.add_subcommand("hsic", "HSIC permutation independence test");
    std::string h_x, h_y, h_sx = "median", h_sy = "median", h_out, h_delim = ",";
    bool h_header = false;
    Index h_b = 200;
    double h_alpha = 0.05;
    std::uint64_t h_seed = 0;
    hsic->add_option("--x", h_x, "CSV of variable X")->required();
    hsic->add_option("--y", h_y, "CSV of variable Y (same row count)")->required();
    hsic->add_option("--permutations", h_b, "permutations B (default 200)");
    hsic->add_option("--alpha", h_alpha, "test level in (0,1), default 0.05");
    hsic->add_option("--seed", h_seed, "RNG seed");
    hsic->add_option("--sigma-x", h_sx, "median or positive bandwidth for X");
    hsic->add_option("--sigma-y", h_sy, "median or positive bandwidth for Y");
    hsic->add_flag("--has-header", h_header, "skip the first CSV row");
    hsic->add_option("--delimiter", h_delim, "CSV field delimiter (default ',')");
    hsic->add_option("--out", h_out, "also write the JSON report to this file");

    // match
    auto* match = app.add_subcommand("match", "Attribute matching via the Hungarian method");
    std::string m_a, m_b, m_stat = "mmd-u2", m_out, m_delim = ",";
    KernelFlags m_kf;
    bool m_header = false;
    match->add_option("--a", m_a, "CSV table A (columns = attributes)")->required();
    match->add_option("--b", m_b, "CSV table B (same column count)")->required();
    match->add_option("--stat", m_stat, "mmd-u2 (squared, floored) or mmd-b (unsquared semi-metric)");
    match->add_option("--kernel", m_kf.kernel, "gaussian|laplace|linear");
    match->add_option("--sigma", m_kf.sigma, "median or positive bandwidth");
    match->add_flag("--has-header", m_header, "skip the first CSV row");
    match->add_option("--delimiter", m_delim, "CSV field delimiter (default ',')");
    match->add_option("--out", m_out, "also write the JSON report to this file");

    // witness
    auto* wit = app.add_subcommand("witness", "Export the empirical witness function");
    std::string w_x, w_y, w_query, w_grid, w_out, w_delim = ",";
    KernelFlags w_kf;
    bool w_header = false;
    wit->add_option("--x", w_x, "CSV of sample X")->required();
    wit->add_option("--y", w_y, "CSV of sample Y")->required();
    wit->add_option("--query", w_query, "CSV of query points");
    wit->add_option("--grid", w_grid, "LO:HI:COUNT evenly spaced 1-D query grid");
    wit->add_option("--kernel", w_kf.kernel, "gaussian|laplace|linear");
    wit->add_option("--sigma", w_kf.sigma, "median or positive bandwidth");
    wit->add_flag("--has-header", w_header, "skip the first CSV row");
    wit->add_option("--delimiter", w_delim, "CSV field delimiter (default ',')");
    wit->add_option("--out", w_out, "also write the CSV to this file");

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Rejection-rate / runtime table on synthetic data");
    std::string b_scenario = "mean-shift", b_out;
    std::vector<Index> b_dims = {1}, b_sizes = {100};
    std::vector<std::string> b_methods = {"bootstrap"};
    Index b_reps = 100, b_iters = 150, b_nsim = 1000;
    double b_shift = 1.0, b_alpha = 0.05;
    std::uint64_t b_seed = 0;
    KernelFlags b_kf;
    bench->add_option("--scenario", b_scenario, "mean-shift|var-shift");
    bench->add_option("--dims", b_dims, "dimension list")->delimiter(',');
    bench->add_option("--sizes", b_sizes, "sample-size list")->delimiter(',');
    bench->add_option("--replicates", b_reps, "replicates per cell (default 100)");
    bench->add_option("--methods", b_methods, "comma-separated method list")->delimiter(',');
    bench->add_option("--shift", b_shift,
                      "mean offset (mean-shift) or stddev multiplier (var-shift); defaults 1.0");
    bench->add_option("--kernel", b_kf.kernel, "gaussian|laplace|linear");
    bench->add_option("--sigma", b_kf.sigma, "median or positive bandwidth");
    bench->add_option("--alpha", b_alpha, "test level, default 0.05");
    bench->add_option("--bootstrap-iters", b_iters, "bootstrap resamplings (default 150)");
    bench->add_option("--n-sim", b_nsim, "spectral null simulations (default 1000)");
    bench->add_option("--seed", b_seed, "RNG seed");
    bench->add_option("--out", b_out, "also write the CSV to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (bk->count() > 0) t_kf.bound_k = t_bound_k;
        if (test->parsed())
            return cmd_test(t_x, t_y, t_header, parse_delim(t_delim), t_method, t_kf, t_alpha,
                            t_b, t_nsim, t_seed, t_stat, t_out);
        if (hsic->parsed())
            return cmd_hsic(h_x, h_y, h_header, parse_delim(h_delim), h_b, h_alpha, h_seed,
                            h_sx, h_sy, h_out);
        if (match->parsed())
            return cmd_match(m_a, m_b, m_header, parse_delim(m_delim), m_stat, m_kf, m_out);
        if (wit->parsed())
            return cmd_witness(w_x, w_y, w_header, parse_delim(w_delim), w_kf, w_query, w_grid, w_out);
        if (bench->parsed())
            return cmd_benchmark(b_scenario, b_dims, b_sizes, b_reps, b_methods, b_shift, b_kf,
                                 b_alpha, b_iters, b_nsim, b_seed, b_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
