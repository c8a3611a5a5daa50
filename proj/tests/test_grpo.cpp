// GRPO rewards, advantages, policy sampling, and estimator benchmarks.
#include <catch2/catch_amalgamated.hpp>

#include "sidetalk/checks.hpp"
#include "sidetalk/grpo.hpp"

using namespace sidetalk;
using FC = FrameClass;

TEST_CASE("reward oracle suite") {
    for (const auto& r : run_reward_checks()) {
        INFO(r.name << " " << r.detail);
        CHECK(r.pass);
    }
}

TEST_CASE("frame weights indexing: w_T = e^beta") {
    const double beta = 1.7;
    const std::vector<double> w = frame_weights(beta, 10);
    CHECK(w.back() == Catch::Approx(std::exp(beta)).epsilon(1e-14));
    CHECK(w.front() == Catch::Approx(std::exp(beta * 0.1)).epsilon(1e-14));
    CHECK_THROWS_AS(frame_weights(1.0, 0), std::invalid_argument);
}

TEST_CASE("reward_frame rejects length mismatch, stays in [0,1]") {
    CHECK_THROWS_AS(
        reward_frame({FC::Target}, {FC::Target, FC::Target}, 1.0), std::invalid_argument);
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t T = 1 + rng.uniform_int(30);
        std::vector<FC> a(T), b(T);
        for (std::size_t t = 0; t < T; ++t) {
            a[t] = static_cast<FC>(rng.uniform_int(3));
            b[t] = static_cast<FC>(rng.uniform_int(3));
        }
        const double r = reward_frame(a, b, rng.uniform(0.0, 4.0));
        REQUIRE(r >= 0.0);
        REQUIRE(r <= 1.0);
        REQUIRE((reward_frame(a, a, 2.0) == 1.0));
    }
}

TEST_CASE("dominant_class errors on empty input") {
    CHECK_THROWS_AS(dominant_class({}), std::invalid_argument);
}

TEST_CASE("normalize_advantages group-size guard and stats output") {
    CHECK_THROWS_AS(normalize_advantages({1.0}), std::invalid_argument);
    GroupStats stats;
    const std::vector<double> adv = normalize_advantages({0.0, 1.0}, &stats);
    CHECK(stats.mu == Catch::Approx(0.5));
    CHECK(stats.sigma == Catch::Approx(0.5));
    CHECK(adv[0] == Catch::Approx(-1.0));
    CHECK(adv[1] == Catch::Approx(1.0));
}

TEST_CASE("grpo config validation") {
    GrpoConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.group_size = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GrpoConfig{};
    cfg.lambda1 = cfg.lambda2 = cfg.lambda3 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GrpoConfig{};
    cfg.lambda2 = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("policy sampling") {
    Rng rng(21);
    const std::size_t T = 6, D = 3;
    Tensor mean{T, D};
    mean.fill_randn(rng, 1.0);
    Tensor log_std{D};
    log_std.fill(-1.0);

    SECTION("deterministic for a fixed seed") {
        const auto a = sample_group(mean, log_std, 4, Rng(99));
        const auto b = sample_group(mean, log_std, 4, Rng(99));
        REQUIRE(a.size() == 4);
        for (std::size_t j = 0; j < 4; ++j) {
            REQUIRE(a[j].z.v == b[j].z.v);
            REQUIRE(a[j].log_prob == b[j].log_prob);
        }
        // distinct members differ
        REQUIRE(a[0].z.v != a[1].z.v);
    }

    SECTION("vanishing std collapses samples onto the mean") {
        Tensor tiny{D};
        tiny.fill(-35.0);
        const auto s = sample_group(mean, tiny, 3, Rng(5));
        for (const auto& smp : s)
            for (std::size_t i = 0; i < smp.z.size(); ++i)
                REQUIRE(std::abs(smp.z.v[i] - mean.v[i]) < 1e-12);
    }

    SECTION("empirical mean approaches the policy mean (law of large numbers)") {
        Tensor mu{2, 2};
        mu(0, 0) = 0.3;
        mu(0, 1) = -1.2;
        mu(1, 0) = 2.0;
        mu(1, 1) = 0.0;
        Tensor ls{2};
        ls.fill(-0.5);
        const std::size_t M = 100000;
        Tensor acc{2, 2};
        Rng base(123);
        for (std::size_t j = 0; j < M; ++j) {
            Rng r = base.derive(j);
            for (std::size_t t = 0; t < 2; ++t)
                for (std::size_t f = 0; f < 2; ++f)
                    acc(t, f) += mu(t, f) + std::exp(ls(f)) * r.normal();
        }
        const double bound = 3.0 * std::exp(-0.5) / std::sqrt(static_cast<double>(M));
        for (std::size_t i = 0; i < 4; ++i)
            REQUIRE(std::abs(acc.v[i] / M - mu.v[i]) < bound);
    }

    SECTION("non-positive std rejected") {
        Tensor bad{D};
        bad.fill(-std::numeric_limits<double>::infinity());
        CHECK_THROWS_AS(sample_group(mean, bad, 2, Rng(1)), std::invalid_argument);
    }

    SECTION("log_prob matches the diagonal Gaussian density") {
        const auto s = sample_group(mean, log_std, 2, Rng(3));
        // independent recomputation
        double lp = 0.0;
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t f = 0; f < D; ++f) {
                const double sg = std::exp(log_std(f));
                const double diff = s[0].z(t, f) - mean(t, f);
                lp += -0.5 * diff * diff / (sg * sg) - std::log(sg) -
                      0.5 * std::log(2.0 * M_PI);
            }
        REQUIRE(s[0].log_prob == Catch::Approx(lp).epsilon(1e-12));
    }
}

TEST_CASE("score upstream: zero advantages produce zero gradient") {
    Rng rng(31);
    Tensor mean{4, 3};
    mean.fill_randn(rng, 1.0);
    Tensor log_std{3};
    log_std.fill(-1.0);
    const auto samples = sample_group(mean, log_std, 4, Rng(7));
    Tensor dmean{4, 3}, dls{3};
    grpo_score_upstream(mean, log_std, samples, {0.0, 0.0, 0.0, 0.0}, dmean, dls);
    for (double g : dmean.v) REQUIRE(g == 0.0);
    for (double g : dls.v) REQUIRE(g == 0.0);
}

TEST_CASE("score upstream matches per-sample log-prob finite differences") {
    // d log pi / d mean and d log pi / d log_std against central differences
    Rng rng(32);
    Tensor mean{3, 2};
    mean.fill_randn(rng, 0.7);
    Tensor log_std{2};
    log_std(0) = -0.3;
    log_std(1) = -1.1;
    const auto samples = sample_group(mean, log_std, 1, Rng(11));
    Tensor dmean{3, 2}, dls{2};
    grpo_score_upstream(mean, log_std, samples, {1.0}, dmean, dls);

    const double eps = 1e-6;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        Tensor m2 = mean;
        m2.v[i] += eps;
        const double up = gaussian_log_prob(samples[0].z, m2, log_std);
        m2.v[i] -= 2 * eps;
        const double dn = gaussian_log_prob(samples[0].z, m2, log_std);
        REQUIRE(dmean.v[i] == Catch::Approx((up - dn) / (2 * eps)).margin(1e-4));
    }
    for (std::size_t f = 0; f < 2; ++f) {
        Tensor l2 = log_std;
        l2.v[f] += eps;
        const double up = gaussian_log_prob(samples[0].z, mean, l2);
        l2.v[f] -= 2 * eps;
        const double dn = gaussian_log_prob(samples[0].z, mean, l2);
        REQUIRE(dls.v[f] == Catch::Approx((up - dn) / (2 * eps)).margin(1e-4));
    }
}
