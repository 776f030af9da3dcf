#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "nuhlab/parallel.hpp"
#include "nuhlab/stats.hpp"

using namespace nuhlab;
using namespace nuhlab::stats;

TEST_CASE("batch means of a constant sequence") {
    const std::vector<double> xs(1000, 2.5);
    const auto m = batch_means(xs, 20);
    CHECK(m.mean == doctest::Approx(2.5));
    CHECK(m.halfwidth == doctest::Approx(0.0));
    CHECK_THROWS_AS(batch_means(std::vector<double>(5, 1.0), 20), std::invalid_argument);
}

TEST_CASE("batch means of alternating blocks") {
    // batches of 10 alternate between 0 and 1: batch variance 1/4 * 20/19
    std::vector<double> xs;
    for (int b = 0; b < 20; ++b) xs.insert(xs.end(), 10, b % 2);
    const auto m = batch_means(xs, 20);
    CHECK(m.mean == doctest::Approx(0.5));
    const double var = 0.25 * 20.0 / 19.0;
    CHECK(m.halfwidth == doctest::Approx(student_t975(19) * std::sqrt(var / 20)));
}

TEST_CASE("least squares recovers a line") {
    const std::vector<double> x{0, 1, 2, 3, 4};
    std::vector<double> y;
    for (double v : x) y.push_back(1.5 - 0.25 * v);
    const auto fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(-0.25));
    CHECK(fit.intercept == doctest::Approx(1.5));
}

TEST_CASE("quantiles interpolate") {
    CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
    CHECK(quantile({0, 10}, 0.25) == 2.5);
    CHECK(quantile({4}, 0.9) == 4.0);
}

TEST_CASE("Birkhoff tail") {
    std::vector<double> xs(100, 1.0);
    auto t = birkhoff_tail(xs);
    CHECK(t.mean == 1.0);
    CHECK(t.cauchy_tail == 0.0);
    xs[0] = 11.0;  // outside the last decade, still in every running mean
    t = birkhoff_tail(xs);
    CHECK(t.mean == doctest::Approx(1.1));
    CHECK(t.cauchy_tail == doctest::Approx(1.0 - 0.1));  // k = 10: S_k / k = 2
}

TEST_CASE("per-sample generators depend only on seed and index") {
    auto a = sample_rng(7, 3), b = sample_rng(7, 3), c = sample_rng(7, 4), d = sample_rng(7, 3, 1);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
}

TEST_CASE("parallel_for fills every slot and rethrows the lowest failure") {
    std::vector<int> out(1000, 0);
    parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
    std::atomic<int> calls{0};
    try {
        parallel_for(100, 4, [&](std::size_t i) {
            ++calls;
            if (i == 30 || i == 70) throw std::runtime_error(std::to_string(i));
        });
        FAIL("no exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "30");
    }
    CHECK(calls == 100);
}
