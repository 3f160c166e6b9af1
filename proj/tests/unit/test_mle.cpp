#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "tiltbound/errors.hpp"
#include "tiltbound/io.hpp"
#include "tiltbound/mle.hpp"
#include "tiltbound/projection.hpp"

using namespace tiltbound;

namespace {

const DiscreteModel kPmf = io::example_pmf();
const ValueFunction kId = ValueFunction::identity();
const oracle::Vec kX = {1, 2, 3, 4, 5, 6, 7, 8};
const oracle::Vec kQ = {0.05, 0.4, 0.2, 0.15, 0.10, 0.07, 0.02, 0.01};
const std::vector<double> kPublishedPhat = {0.0236, 0.2526, 0.1692, 0.1699, 0.1517, 0.1422, 0.0544, 0.0364};

std::vector<std::uint64_t> rounded_counts(std::span<const double> p, double n) {
    std::vector<std::uint64_t> c;
    for (double x : p) c.push_back(static_cast<std::uint64_t>(std::llround(n * x)));
    return c;
}

// Adds observations at the integer atoms next to a until the sample mean of
// the identity is exactly a.
std::vector<std::uint64_t> with_mean(std::vector<std::uint64_t> c, const oracle::Vec& x, double a) {
    long long deficit = 0;
    for (std::size_t i = 0; i < c.size(); ++i) deficit += static_cast<long long>(c[i]) * static_cast<long long>(x[i] - a);
    const auto below = static_cast<std::size_t>(a - x[0] - 1);
    if (deficit > 0) c[below] += static_cast<std::uint64_t>(deficit);
    if (deficit < 0) c[below + 2] += static_cast<std::uint64_t>(-deficit);
    return c;
}

}  // namespace

TEST_CASE("log-likelihood special cases") {
    const Sample s({3, 1, 0, 0, 0, 0, 0, 2});
    CHECK(log_likelihood(kPmf, kId, 0.0, s) ==
          doctest::Approx(3 * std::log(0.05) + std::log(0.4) + 2 * std::log(0.01)).epsilon(1e-14));
    const Sample one({0, 0, 0, 1, 0, 0, 0, 0});
    CHECK(log_likelihood(kPmf, kId, 0.0, one) == doctest::Approx(std::log(0.15)).epsilon(1e-15));
}

TEST_CASE("log-likelihood matches a per-term oracle") {
    const auto proj = i_projection(kPmf, kId, 4.0);
    const Sample s(rounded_counts(proj.pmf()->prob(), 100));
    const std::vector<std::uint64_t> counts(s.counts().begin(), s.counts().end());
    const double ref = static_cast<double>(oracle::log_likelihood(kQ, kX, counts, proj.theta_hat));
    CHECK(std::abs(log_likelihood(kPmf, kId, proj.theta_hat, s) - ref) <= 1e-10 * std::abs(ref));
}

TEST_CASE("sample at the mean gives theta 0 and a unit bound") {
    const Sample s({5, 40, 20, 15, 10, 7, 2, 1});
    const auto ml = ml_estimate(kPmf, kId, s);
    CHECK(ml.theta_hat == 0.0);
    CHECK(chernoff_from_likelihood(kPmf, s, log_likelihood(kPmf, kId, 0.0, s)) == doctest::Approx(1.0));
}

TEST_CASE("ML estimate coincides with the Chernoff minimizer") {
    const double theta4 = optimize_theta(kPmf, kId, 4.0).theta_hat;
    for (double n : {10.0, 100.0, 12345.0}) {
        const auto proj = i_projection(kPmf, kId, 4.0);
        const Sample s(with_mean(rounded_counts(proj.pmf()->prob(), n), kX, 4.0));
        CHECK(sample_mean_v(kPmf, kId, s) == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(std::abs(ml_estimate(kPmf, kId, s).theta_hat - theta4) <= 1e-8);
    }
}

TEST_CASE("ML estimate on a large sample from the published projection") {
    DeterministicRng rng(42);
    const Sample s = sample_multinomial(kPublishedPhat, 1000000, rng);
    const std::vector<std::uint64_t> counts(s.counts().begin(), s.counts().end());
    // Grid search on [-5, 5] with step 1e-4, then curvature by differences.
    double best_t = -5.0;
    long double best = -INFINITY;
    for (int k = 0; k <= 100000; ++k) {
        const double t = -5.0 + 1e-4 * k;
        const long double l = oracle::log_likelihood(kQ, kX, counts, t);
        if (l > best) {
            best = l;
            best_t = t;
        }
    }
    const double h = 1e-3;
    const long double curv = (oracle::log_likelihood(kQ, kX, counts, best_t + h) - 2 * best +
                              oracle::log_likelihood(kQ, kX, counts, best_t - h)) /
                             (h * h);
    const double se = 1.0 / std::sqrt(static_cast<double>(-curv));
    const double theta_ml = ml_estimate(kPmf, kId, s).theta_hat;
    CHECK(std::abs(theta_ml - best_t) <= 1e-4);
    CHECK(std::abs(theta_ml - optimize_theta(kPmf, kId, 4.0).theta_hat) <= 3 * se);
    const double from_lik = chernoff_from_likelihood(kPmf, s, log_likelihood(kPmf, kId, theta_ml, s));
    CHECK(std::abs(from_lik - 0.8829) <= 2e-3);
}

TEST_CASE("likelihood bound equals the direct expression on seeded samples") {
    std::mt19937_64 gen(37);
    DeterministicRng rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        auto r = oracle::random_pmf(gen, 8 + rep % 10);
        const DiscreteModel m(r.x, r.q);
        const Sample s = sample_multinomial(m.prob(), 50 + 97 * rep, rng);
        const auto ml = max_log_likelihood(m, kId, s);
        if (ml.boundary) continue;
        const double vbar = sample_mean_v(m, kId, s);
        const double direct = std::exp(cgf(m, kId, ml.theta) - ml.theta * vbar);
        CHECK(std::abs(chernoff_from_likelihood(m, s, ml.log_likelihood) / direct - 1) <= 1e-10);
        // l/n = sum f_i log q_i - (K - theta vbar) at the maximizer.
        const auto f = s.frequencies();
        double cross = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i] > 0) cross += f[i] * std::log(r.q[i]);
        }
        const double lhs = ml.log_likelihood / static_cast<double>(s.total());
        CHECK(std::abs(lhs - (cross - (cgf(m, kId, ml.theta) - ml.theta * vbar))) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("log-likelihood is concave and stationary at the estimate") {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> th(-3.0, 3.0);
    DeterministicRng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        auto r = oracle::random_pmf(gen, 10);
        const DiscreteModel m(r.x, r.q);
        const Sample s = sample_multinomial(m.prob(), 1000, rng);
        for (int k = 0; k < 10; ++k) {
            const double t1 = th(gen);
            const double t2 = th(gen);
            const double mid = log_likelihood(m, kId, 0.5 * (t1 + t2), s);
            CHECK(mid >= 0.5 * (log_likelihood(m, kId, t1, s) + log_likelihood(m, kId, t2, s)) - 1e-10);
        }
        const double t = ml_estimate(m, kId, s).theta_hat;
        const double h = 1e-6;
        const double d = (log_likelihood(m, kId, t + h, s) - log_likelihood(m, kId, t - h, s)) / (2 * h);
        CHECK(std::abs(d) <= 1e-6 * static_cast<double>(s.total()));
    }
}

TEST_CASE("product forms agree at a plug-in sample") {
    // Build q so that the projection at a is exactly counts / n.
    const std::vector<std::uint64_t> counts = {1, 3, 2, 4, 6, 3, 1};
    const double n = 20.0;
    const oracle::Vec x = {0, 1, 2, 3, 4, 5, 6};
    const double theta = 0.4;
    oracle::Vec q;
    double total = 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        q.push_back(counts[i] / n * std::exp(-theta * x[i]));
        total += q.back();
        a += counts[i] / n * x[i];
    }
    for (double& w : q) w /= total;
    const DiscreteModel m(x, q);
    const auto proj = i_projection(m, kId, a);
    const auto p = proj.pmf()->prob();
    double plug = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) plug += counts[i] / n * std::log(q[i] / p[i]);
    CHECK(std::abs(product_form_bound(proj, m) - std::exp(plug)) <= 1e-12);
    // With exact frequencies the per-observation likelihood is -H(p).
    std::vector<double> freq;
    double minus_h = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        freq.push_back(counts[i] / n);
        minus_h += freq.back() * std::log(freq.back());
    }
    CHECK(std::abs(mean_log_likelihood(m, kId, proj.theta_hat, freq) - minus_h) <= 1e-12);
}

TEST_CASE("sample validation") {
    const DiscreteModel z({1, 2, 3}, {0.5, 0.5, 0.0});
    CHECK_THROWS_AS(Sample({0, 0, 0}), InputError);
    CHECK_THROWS_AS(ml_estimate(z, kId, Sample({0, 0, 3})), ImpossibleSample);
    CHECK_THROWS_AS(log_likelihood(z, kId, 0.0, Sample({1, 2})), SupportMismatch);
    CHECK_THROWS_AS(ml_estimate(kPmf, kId, Sample({0, 0, 0, 0, 0, 0, 0, 4})), MLBoundary);
    const auto ml = max_log_likelihood(kPmf, kId, Sample({0, 0, 0, 0, 0, 0, 0, 4}));
    CHECK(ml.boundary);
    CHECK(std::isinf(ml.theta));
    CHECK(ml.log_likelihood == doctest::Approx(0.0));
}

TEST_CASE("multinomial sampling is deterministic") {
    DeterministicRng a(42);
    DeterministicRng b(42);
    const Sample s1 = sample_multinomial(kPmf.prob(), 1000, a);
    const Sample s2 = sample_multinomial(kPmf.prob(), 1000, b);
    CHECK(std::equal(s1.counts().begin(), s1.counts().end(), s2.counts().begin()));
    CHECK(s1.total() == 1000);
    // Zero-mass atoms are never drawn.
    DeterministicRng c(1);
    const Sample s3 = sample_multinomial(std::vector<double>{0.5, 0.0, 0.5}, 10000, c);
    CHECK(s3.counts()[1] == 0);
}

TEST_CASE("asymptotic experiment") {
    const std::vector<std::uint64_t> ns = {100, 10000, 1000000};
    const auto rows = asymptotic_experiment(kPmf, kId, 4.0, ns, 42);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].deviation > rows[1].deviation);
    CHECK(rows[1].deviation > rows[2].deviation);
    CHECK(rows[0].empirical_max_dev > rows[1].empirical_max_dev);
    CHECK(rows[1].empirical_max_dev > rows[2].empirical_max_dev);
    CHECK(rows[2].deviation <= 5e-3);
    for (const auto& r : rows) CHECK(r.chernoff_target == doctest::Approx(r.minus_entropy_target).epsilon(1e-13));

    const std::vector<std::uint64_t> one = {1};
    const auto single = asymptotic_experiment(kPmf, kId, 4.0, one, 42);
    REQUIRE(single.size() == 1);
    CHECK(std::isfinite(single[0].loglik_over_n));
    CHECK(std::isfinite(single[0].deviation));

    // At the mean the projection is q itself.
    const auto at_mean = asymptotic_experiment(kPmf, kId, 3.19, one, 42);
    CHECK(at_mean[0].minus_entropy_target == doctest::Approx(static_cast<double>(oracle::kl(kQ, {1, 1, 1, 1, 1, 1, 1, 1}))).epsilon(1e-14));

    const std::vector<std::uint64_t> bad = {100, 10};
    CHECK_THROWS_AS(asymptotic_experiment(kPmf, kId, 4.0, bad, 42), InputError);
}
