#include <doctest.h>

#include <cmath>

#include "mmdkit/independence.hpp"
#include "mmdkit/synthetic.hpp"
#include "mmdkit/two_sample.hpp"

using namespace mmdkit;

namespace {

const std::vector<Method> kAllMethods = {Method::biased_bound, Method::hoeffding,
                                         Method::bootstrap,    Method::pearson,
                                         Method::spectral,     Method::linear};

}  // namespace

TEST_CASE("identical samples are never rejected") {
    Rng rng(1);
    const Sample x = sample_normal(20, 2, rng);
    for (Method method : kAllMethods) {
        TestConfig cfg;
        cfg.method = method;
        cfg.seed = 9;
        const TestResult res = run_two_sample_test(x, x, cfg);
        CHECK_FALSE(res.reject);
        CHECK(res.statistic.value <= res.threshold);
    }
}

TEST_CASE("determinism: identical inputs and seed give identical results") {
    Rng rng(2);
    const Sample x = sample_normal(30, 2, rng);
    const Sample y = sample_normal(30, 2, rng, 0.3);
    for (Method method : kAllMethods) {
        TestConfig cfg;
        cfg.method = method;
        cfg.seed = 1234567;
        const TestResult a = run_two_sample_test(x, y, cfg);
        const TestResult b = run_two_sample_test(x, y, cfg);
        CHECK(a.statistic.value == b.statistic.value);
        CHECK(a.threshold == b.threshold);
        CHECK(a.reject == b.reject);
        CHECK(a.p_value.has_value() == b.p_value.has_value());
        if (a.p_value) CHECK(*a.p_value == *b.p_value);
        CHECK(a.kernel.sigma == b.kernel.sigma);
    }
}

TEST_CASE("p-value presence per method") {
    Rng rng(3);
    const Sample x = sample_normal(16, 1, rng);
    const Sample y = sample_normal(16, 1, rng);
    for (Method method : kAllMethods) {
        TestConfig cfg;
        cfg.method = method;
        cfg.bootstrap_iters = 25;
        cfg.n_sim = 25;
        const TestResult res = run_two_sample_test(x, y, cfg);
        const bool expect_p = method == Method::bootstrap || method == Method::pearson ||
                              method == Method::spectral || method == Method::linear;
        CHECK(res.p_value.has_value() == expect_p);
        if (res.p_value) {
            CHECK(*res.p_value >= 0.0);
            CHECK(*res.p_value <= 1.0);
        }
        CHECK(res.reject == (res.statistic.value > res.threshold));
    }
}

TEST_CASE("bootstrap p-value respects the add-one floor") {
    Rng rng(4);
    for (int t = 0; t < 10; ++t) {
        Rng dr = rng.stream(std::uint64_t(t));
        const Sample x = sample_normal(12, 1, dr);
        const Sample y = sample_normal(12, 1, dr, 2.0);
        TestConfig cfg;
        cfg.method = Method::bootstrap;
        cfg.bootstrap_iters = 50;
        cfg.seed = std::uint64_t(t);
        const TestResult res = run_two_sample_test(x, y, cfg);
        REQUIRE(res.p_value.has_value());
        CHECK(*res.p_value >= 1.0 / 51.0);
        CHECK(*res.p_value <= 1.0);
    }
}

TEST_CASE("median-auto resolves sigma from the pooled sample") {
    Rng rng(5);
    const Sample x = sample_normal(10, 2, rng);
    const Sample y = sample_normal(14, 2, rng, 1.0);
    TestConfig cfg;
    cfg.method = Method::biased_bound;
    const TestResult res = run_two_sample_test(x, y, cfg);
    CHECK(res.kernel.sigma == median_heuristic(x, y));
    CHECK(res.kernel.family == KernelFamily::gaussian);

    cfg.kernel = KernelChoice::gaussian(0.5);
    CHECK(run_two_sample_test(x, y, cfg).kernel.sigma == 0.5);
}

TEST_CASE("unequal sample sizes") {
    Rng rng(6);
    const Sample x = sample_normal(10, 1, rng);
    const Sample y = sample_normal(7, 1, rng);
    TestConfig cfg;

    cfg.method = Method::biased_bound;
    CHECK_NOTHROW((void)run_two_sample_test(x, y, cfg));

    cfg.method = Method::bootstrap;
    CHECK_THROWS_AS((void)run_two_sample_test(x, y, cfg), std::invalid_argument);
    cfg.bootstrap_stat = StatKind::mmd_b;
    const TestResult res = run_two_sample_test(x, y, cfg);
    CHECK(res.statistic.kind == StatKind::mmd_b);
    CHECK(res.m == 10);
    CHECK(res.n == 7);

    for (Method method : {Method::hoeffding, Method::pearson, Method::spectral, Method::linear}) {
        cfg.method = method;
        CHECK_THROWS_AS((void)run_two_sample_test(x, y, cfg), std::invalid_argument);
    }
}

TEST_CASE("bound methods demand a bounded kernel") {
    Rng rng(7);
    const Sample x = sample_normal(8, 1, rng);
    const Sample y = sample_normal(8, 1, rng);
    TestConfig cfg;
    cfg.kernel = KernelChoice::linear();
    for (Method method : {Method::biased_bound, Method::hoeffding}) {
        cfg.method = method;
        CHECK_THROWS_WITH_AS((void)run_two_sample_test(x, y, cfg),
                             doctest::Contains("bound test requires a bounded kernel"),
                             std::invalid_argument);
    }
    cfg.method = Method::bootstrap;
    CHECK_NOTHROW((void)run_two_sample_test(x, y, cfg));
}

TEST_CASE("config validation") {
    Rng rng(8);
    const Sample x = sample_normal(8, 1, rng);
    TestConfig cfg;
    cfg.alpha = 1.5;
    CHECK_THROWS_AS((void)run_two_sample_test(x, x, cfg), std::invalid_argument);
    cfg.alpha = 0.05;
    cfg.bootstrap_iters = 0;
    CHECK_THROWS_AS((void)run_two_sample_test(x, x, cfg), std::invalid_argument);
}

TEST_CASE("precomputed Gram path reproduces the sample path") {
    Rng rng(9);
    const Sample x = sample_normal(12, 2, rng);
    const Sample y = sample_normal(12, 2, rng, 0.8);
    const KernelSpec g = KernelSpec::gaussian(1.0);
    const Matrix agg = aggregate_gram(gram_blocks(g, x, y));

    TestConfig direct;
    direct.method = Method::bootstrap;
    direct.kernel = KernelChoice::gaussian(1.0);
    direct.seed = 99;
    const TestResult want = run_two_sample_test(x, y, direct);

    TestConfig via = direct;
    via.kernel = KernelChoice::precomputed(agg, 12, 1.0);
    const TestResult got = run_two_sample_test(KernelSpec::precomputed(agg, 12, 1.0), via);
    CHECK(got.statistic.value == doctest::Approx(want.statistic.value).epsilon(1e-14));
    CHECK(got.threshold == doctest::Approx(want.threshold).epsilon(1e-14));
    CHECK(got.reject == want.reject);

    via.method = Method::linear;
    CHECK_THROWS_AS((void)run_two_sample_test(KernelSpec::precomputed(agg, 12, 1.0), via),
                    std::invalid_argument);

    // bound method runs off the declared bound
    via.method = Method::biased_bound;
    CHECK_NOTHROW((void)run_two_sample_test(KernelSpec::precomputed(agg, 12, 1.0), via));
    const KernelSpec unbounded = KernelSpec::precomputed(agg, 12);
    CHECK_THROWS_AS((void)run_two_sample_test(unbounded, via), std::invalid_argument);
}

TEST_CASE("witness basics") {
    const KernelSpec g = KernelSpec::gaussian(1.0);
    Rng rng(10);
    const Sample x = sample_normal(15, 1, rng);
    const Sample q = sample_normal(5, 1, rng);
    for (double v : witness(x, x, g, q)) CHECK(v == 0.0);

    // single x, single y, query at x: 1 - exp(-1) for ||x - y||^2 = 2
    const Sample x1{(Matrix(1, 2) << 0.0, 0.0).finished()};
    const Sample y1{(Matrix(1, 2) << 1.0, 1.0).finished()};
    const Sample at_x{(Matrix(1, 2) << 0.0, 0.0).finished()};
    const double f = witness(x1, y1, g, at_x)[0];
    CHECK(f == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(f == doctest::Approx(0.632121).epsilon(1e-5));

    // antisymmetry, exact
    const Sample y = sample_normal(13, 1, rng, 0.7);
    const auto fxy = witness(x, y, g, q);
    const auto fyx = witness(y, x, g, q);
    for (std::size_t i = 0; i < fxy.size(); ++i) CHECK(fxy[i] == -fyx[i]);

    const Sample wrong{(Matrix(2, 3) << 1, 2, 3, 4, 5, 6).finished()};
    CHECK_THROWS_AS((void)witness(x, y, g, wrong), std::invalid_argument);
}

TEST_CASE("witness sign pattern for Laplace vs Gaussian") {
    // Both zero mean, unit variance; Laplace density exceeds the Gaussian at
    // the centre and in the tails, the Gaussian wins in between.
    Rng rng(11);
    const Index m = 20000;
    const Sample lap = sample_laplace(m, 1, rng, 0.0, 1.0 / std::sqrt(2.0));
    const Sample gauss = sample_normal(m, 1, rng);
    const KernelSpec k = KernelSpec::gaussian(0.5);
    const Sample q{(Matrix(5, 1) << 0.0, -1.0, 1.0, -3.5, 3.5).finished()};
    const auto f = witness(lap, gauss, k, q);
    CHECK(f[0] > 0.0);  // centre
    CHECK(f[1] < 0.0);
    CHECK(f[2] < 0.0);
    CHECK(f[3] > 0.0);  // tails
    CHECK(f[4] > 0.0);
}

TEST_CASE("runtime field is populated") {
    Rng rng(12);
    const Sample x = sample_normal(40, 1, rng);
    const Sample y = sample_normal(40, 1, rng);
    TestConfig cfg;
    cfg.method = Method::bootstrap;
    const TestResult res = run_two_sample_test(x, y, cfg);
    CHECK(res.runtime_ms >= 0.0);
    CHECK(res.m == 40);
    CHECK(res.seed == cfg.seed);
}
