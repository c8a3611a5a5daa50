// Forward semantics of the sequence kernels: discretization, scans,
// Tri-Mamba symmetries, Mix Block, and the FDM adapter.
#include <catch2/catch_amalgamated.hpp>

#include "sidetalk/fdm.hpp"
#include "sidetalk/mix_block.hpp"
#include "sidetalk/ssm.hpp"
#include "sidetalk/tri_mamba.hpp"

using namespace sidetalk;

namespace {

Tensor random_features(Rng& rng, std::size_t T, std::size_t D, double scale = 1.0) {
    Tensor x{T, D};
    x.fill_randn(rng, scale);
    return x;
}

}  // namespace

TEST_CASE("discretize_ssm") {
    SECTION("A_i = 0 limit") {
        SsmParams p;
        p.a = Tensor{2};
        p.b = Tensor{2};
        p.b.fill(3.0);
        p.c = Tensor{2};
        p.delta = 0.7;
        auto [abar, bbar] = discretize_ssm(p);
        CHECK(abar(0) == 1.0);
        CHECK(bbar(0) == Catch::Approx(0.7 * 3.0).epsilon(1e-15));
    }

    SECTION("A = -1, delta = ln 2 gives Abar = 0.5") {
        SsmParams p;
        p.a = Tensor{1};
        p.a(0) = -1.0;
        p.b = Tensor{1};
        p.b(0) = 1.0;
        p.c = Tensor{1};
        p.delta = std::log(2.0);
        auto [abar, bbar] = discretize_ssm(p);
        CHECK(abar(0) == Catch::Approx(0.5).epsilon(1e-14));
    }

    SECTION("decaying modes stay inside the unit circle") {
        Rng rng(1);
        SsmParams p;
        p.a = Tensor{16};
        for (std::size_t i = 0; i < 16; ++i) p.a(i) = -0.01 - 3.0 * rng.uniform();
        p.b = Tensor{16};
        p.b.fill(1.0);
        p.c = Tensor{16};
        p.delta = 0.3;
        auto [abar, bbar] = discretize_ssm(p);
        for (std::size_t i = 0; i < 16; ++i) {
            CHECK(std::abs(abar(i)) < 1.0);
            CHECK(std::abs(abar(i)) > 0.0);
        }
    }

    SECTION("stability clamp caps growing modes at 1") {
        SsmParams p;
        p.a = Tensor{1};
        p.a(0) = 2.0;
        p.b = Tensor{1};
        p.b(0) = 1.0;
        p.c = Tensor{1};
        p.delta = 1.0;
        auto [abar, bbar] = discretize_ssm(p);
        CHECK(abar(0) == 1.0);
    }

    SECTION("non-positive delta rejected") {
        SsmParams p;
        p.a = Tensor{1};
        p.b = Tensor{1};
        p.c = Tensor{1};
        p.delta = 0.0;
        CHECK_THROWS_AS(discretize_ssm(p), std::invalid_argument);
    }
}

TEST_CASE("ssm_scan semantics") {
    Rng rng(2);
    std::vector<double> u(64);
    for (double& x : u) x = rng.normal();

    SECTION("memoryless identity: Abar=0, Bbar=1, C=1") {
        Tensor abar{1}, bbar{1}, c{1};
        bbar(0) = 1.0;
        c(0) = 1.0;
        const std::vector<double> y = ssm_scan(abar, bbar, c, u);
        for (std::size_t t = 0; t < u.size(); ++t)
            REQUIRE(y[t] == Catch::Approx(u[t]).margin(1e-15));
    }

    SECTION("integrator: Abar=1, Bbar=1, C=1") {
        Tensor abar{1}, bbar{1}, c{1};
        abar(0) = 1.0;
        bbar(0) = 1.0;
        c(0) = 1.0;
        const std::vector<double> y = ssm_scan(abar, bbar, c, u);
        double run = 0.0;
        for (std::size_t t = 0; t < u.size(); ++t) {
            run += u[t];
            REQUIRE(y[t] == Catch::Approx(run).margin(1e-12));
        }
    }

    SECTION("matches an independent per-step recurrence oracle to 1e-12") {
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t N = 1 + rng.uniform_int(16);
            const std::size_t T = 1 + rng.uniform_int(512);
            SsmParams p;
            p.a = Tensor{N};
            p.b = Tensor{N};
            p.c = Tensor{N};
            for (std::size_t i = 0; i < N; ++i) {
                p.a(i) = -0.01 - 2.0 * rng.uniform();
                p.b(i) = rng.normal();
                p.c(i) = rng.normal();
            }
            p.delta = 0.05 + rng.uniform();
            std::vector<double> uu(T);
            for (double& x : uu) x = rng.normal();

            const std::vector<double> y = ssm_scan(p, uu);

            // oracle: naive recurrence written out straight from the formulas
            std::vector<double> state(N, 0.0);
            for (std::size_t t = 0; t < T; ++t) {
                double out = 0.0;
                for (std::size_t i = 0; i < N; ++i) {
                    const double ab = std::min(std::exp(p.delta * p.a(i)), 1.0);
                    const double bb = (std::exp(p.delta * p.a(i)) - 1.0) / p.a(i) * p.b(i);
                    state[i] = ab * state[i] + bb * uu[t];
                    out += p.c(i) * state[i];
                }
                REQUIRE(std::abs(y[t] - out) <= 1e-12);
            }
        }
    }
}

TEST_CASE("selective scan semantics") {
    Rng rng(3);

    SECTION("zeroed projections reduce to the constant-parameter scan") {
        SelScan p;
        p.init(rng, 1, 4, 1);
        p.Wd.zero();
        p.WB.zero();
        p.WC.zero();
        std::vector<double> input(40);
        for (double& x : input) x = rng.normal();
        const std::vector<double> y = selective_scan(p, input);

        SsmParams fixed;
        fixed.a = Tensor{4};
        for (std::size_t i = 0; i < 4; ++i) fixed.a(i) = p.A(0, i);
        fixed.b = p.bB;
        fixed.c = p.bC;
        fixed.delta = softplus(p.bd(0));
        const std::vector<double> y_ref = ssm_scan(fixed, input);
        for (std::size_t t = 0; t < input.size(); ++t)
            REQUIRE(y[t] == Catch::Approx(y_ref[t]).margin(1e-12));
    }

    SECTION("causality: zero output before the first nonzero input") {
        SelScan p;
        p.init(rng, 1, 4, 1);
        std::vector<double> input(32, 0.0);
        input[20] = 1.0;
        const std::vector<double> y = selective_scan(p, input);
        for (std::size_t t = 0; t < 20; ++t) REQUIRE(y[t] == 0.0);
        REQUIRE(std::abs(y[20]) > 0.0);
    }

    SECTION("matches a per-step time-varying oracle to 1e-12") {
        const std::size_t H = 3, N = 4, Dc = 5, T = 32;
        SelScan p;
        p.init(rng, H, N, Dc);
        Tensor u = random_features(rng, T, H);
        Tensor ctx = random_features(rng, T, Dc);
        SelScanCache cache;
        selscan_forward(p, u, ctx, cache);

        std::vector<double> state(H * N, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<double> Bt(N), Ct(N);
            for (std::size_t i = 0; i < N; ++i) {
                double sb = p.bB(i), sc = p.bC(i);
                for (std::size_t j = 0; j < Dc; ++j) {
                    sb += p.WB(i, j) * ctx(t, j);
                    sc += p.WC(i, j) * ctx(t, j);
                }
                Bt[i] = sb;
                Ct[i] = sc;
            }
            for (std::size_t h = 0; h < H; ++h) {
                double pre = p.bd(h);
                for (std::size_t j = 0; j < Dc; ++j) pre += p.Wd(h, j) * ctx(t, j);
                const double dlt = std::log1p(std::exp(pre));
                double out = 0.0;
                for (std::size_t i = 0; i < N; ++i) {
                    const double raw = std::exp(dlt * p.A(h, i));
                    const double ab = std::min(raw, 1.0);
                    const double bb = (raw - 1.0) / p.A(h, i) * Bt[i];
                    state[h * N + i] = ab * state[h * N + i] + bb * u(t, h);
                    out += Ct[i] * state[h * N + i];
                }
                REQUIRE(std::abs(cache.y(t, h) - out) <= 1e-12);
            }
        }
    }
}

TEST_CASE("tri-mamba block") {
    Rng rng(4);

    SECTION("T=1 with tied directions: halves agree") {
        TriMambaBlock blk;
        blk.init(rng, 6, 4, 3, 4, 6);
        blk.tie_directions();
        Tensor x = random_features(rng, 1, 6);
        TriMambaCache cache;
        const Tensor y = tri_mamba_forward(blk, x, cache);
        REQUIRE(y.dims[1] == 8);
        for (std::size_t h = 0; h < 4; ++h)
            REQUIRE(y(0, h) == Catch::Approx(y(0, 4 + h)).margin(1e-13));
    }

    SECTION("time reversal with tied directions swaps the halves") {
        TriMambaBlock blk;
        blk.init(rng, 5, 4, 3, 4, 5);
        blk.tie_directions();
        const std::size_t T = 16;
        Tensor x = random_features(rng, T, 5);
        Tensor xr{T, 5};
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t j = 0; j < 5; ++j) xr(t, j) = x(T - 1 - t, j);
        TriMambaCache c1, c2;
        const Tensor y = tri_mamba_forward(blk, x, c1);
        const Tensor yr = tri_mamba_forward(blk, xr, c2);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t h = 0; h < 4; ++h)
                REQUIRE(yr(t, h) == Catch::Approx(y(T - 1 - t, 4 + h)).margin(1e-12));
    }

    SECTION("each half matches its standalone single-direction scan") {
        TriMambaBlock blk;
        blk.init(rng, 5, 4, 3, 4, 5);
        const std::size_t T = 16, H = 4, D = 5, L = 4;
        Tensor x = random_features(rng, T, D);
        TriMambaCache cache;
        const Tensor y = tri_mamba_forward(blk, x, cache);

        // forward half standalone
        {
            Tensor u{T, H}, ctx{T, D};
            for (std::size_t t = 0; t < T; ++t) {
                affine(blk.Win_f, blk.bin_f, &x.v[t * D], &u.v[t * H]);
                const std::size_t lo = t + 1 >= L ? t + 1 - L : 0;
                for (std::size_t s = lo; s <= t; ++s)
                    for (std::size_t j = 0; j < D; ++j)
                        ctx(t, j) += x(s, j) / static_cast<double>(t - lo + 1);
            }
            SelScanCache sc;
            selscan_forward(blk.fwd, u, ctx, sc);
            for (std::size_t t = 0; t < T; ++t)
                for (std::size_t h = 0; h < H; ++h)
                    REQUIRE(y(t, h) == Catch::Approx(sc.y(t, h)).margin(1e-12));
        }
        // backward half standalone: reversed-time causal scan
        {
            Tensor u{T, H}, ctx{T, D};
            for (std::size_t t = 0; t < T; ++t) {
                const std::size_t rt = T - 1 - t;  // reversed index
                affine(blk.Win_b, blk.bin_b, &x.v[rt * D], &u.v[t * H]);
                const std::size_t hi = std::min(T - 1, rt + L - 1);
                for (std::size_t s = rt; s <= hi; ++s)
                    for (std::size_t j = 0; j < D; ++j)
                        ctx(t, j) += x(s, j) / static_cast<double>(hi - rt + 1);
            }
            SelScanCache sc;
            selscan_forward(blk.bwd, u, ctx, sc);
            for (std::size_t t = 0; t < T; ++t)
                for (std::size_t h = 0; h < H; ++h)
                    REQUIRE(y(t, h + H) == Catch::Approx(sc.y(T - 1 - t, h)).margin(1e-12));
        }
    }

    SECTION("width mismatch rejected") {
        TriMambaBlock blk;
        blk.init(rng, 5, 4, 3, 4, 5);
        Tensor x = random_features(rng, 8, 6);
        TriMambaCache cache;
        CHECK_THROWS_AS(tri_mamba_forward(blk, x, cache), std::invalid_argument);
    }
}

TEST_CASE("mix block") {
    Rng rng(5);
    MixBlock mb;
    mb.init(rng, 2, 6, 3, 4, 64, 32);

    MultiChannelWaveform wave;
    wave.channels.assign(2, std::vector<double>(320));
    for (auto& ch : wave.channels)
        for (double& x : ch) x = 0.1 * rng.normal();

    SECTION("output frames align to ceil(samples/stride)") {
        MixBlockCache cache;
        const FeatureSequence f = mix_block_forward(mb, wave, cache);
        CHECK(f.num_frames() == (320 + 31) / 32);
        CHECK(f.width() == 6);
    }

    SECTION("zeroing the inner block leaves exactly the frontend") {
        MixBlock mb2 = mb;
        mb2.tri.Wout.zero();
        mb2.tri.bout.zero();
        MixBlockCache cache;
        const FeatureSequence f = mix_block_forward(mb2, wave, cache);
        for (std::size_t i = 0; i < f.values.size(); ++i)
            REQUIRE(f.values.v[i] == cache.frontend.v[i]);

        // and the frontend is conv+ReLU+norm computed independently
        const long pad = mb2.pad_left();
        for (std::size_t t = 0; t < f.num_frames(); ++t)
            for (std::size_t h = 0; h < 6; ++h) {
                double acc = mb2.bc(h);
                for (std::size_t c = 0; c < 2; ++c)
                    for (std::size_t k = 0; k < 64; ++k) {
                        const long s = static_cast<long>(t * 32) - pad + static_cast<long>(k);
                        if (s >= 0 && s < 320) acc += mb2.Wc(h, c, k) * wave.channels[c][s];
                    }
                acc = std::max(acc, 0.0);
                const double expect = mb2.norm.gamma(h) * (acc - mb2.norm.run_mean(h)) /
                                          std::sqrt(mb2.norm.run_var(h) + mb2.norm.eps) +
                                      mb2.norm.beta(h);
                REQUIRE(f.values(t, h) == Catch::Approx(expect).margin(1e-12));
            }
    }

    SECTION("all-zero waveform gives a constant per feature (norm shift only)") {
        MixBlock mb2 = mb;
        mb2.tri.Wout.zero();
        mb2.tri.bout.zero();
        mb2.norm.beta.fill_randn(rng, 1.0);
        MultiChannelWaveform zero;
        zero.channels.assign(2, std::vector<double>(320, 0.0));
        MixBlockCache cache;
        const FeatureSequence f = mix_block_forward(mb2, zero, cache);
        for (std::size_t h = 0; h < 6; ++h) {
            const double expect = mb2.norm.gamma(h) * (0.0 - mb2.norm.run_mean(h)) /
                                      std::sqrt(mb2.norm.run_var(h) + mb2.norm.eps) +
                                  mb2.norm.beta(h);
            for (std::size_t t = 0; t < f.num_frames(); ++t)
                REQUIRE(f.values(t, h) == Catch::Approx(expect).margin(1e-12));
        }
    }

    SECTION("inter-channel delay changes the output (phase sensitivity)") {
        MultiChannelWaveform delayed;
        delayed.channels = wave.channels;
        // shift channel 1 by 5 samples
        std::vector<double>& ch = delayed.channels[1];
        std::vector<double> shifted(ch.size(), 0.0);
        for (std::size_t n = 5; n < ch.size(); ++n) shifted[n] = ch[n - 5];
        ch = shifted;
        MixBlockCache c1, c2;
        const FeatureSequence a = mix_block_forward(mb, wave, c1);
        const FeatureSequence b = mix_block_forward(mb, delayed, c2);
        double l2 = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            const double d = a.values.v[i] - b.values.v[i];
            l2 += d * d;
        }
        CHECK(l2 > 0.0);
    }

    SECTION("channel mismatch rejected") {
        MultiChannelWaveform bad;
        bad.channels.assign(3, std::vector<double>(320, 0.0));
        MixBlockCache cache;
        CHECK_THROWS_AS(mix_block_forward(mb, bad, cache), std::invalid_argument);
    }
}

TEST_CASE("fdm adapter") {
    Rng rng(6);
    const std::size_t D = 8, T = 12;

    SECTION("equal logits give uniform posteriors") {
        Fdm fdm;
        fdm.init(rng, D);
        fdm.Wcls.zero();
        fdm.Wdirect.zero();
        fdm.bcls.zero();
        FeatureSequence feat;
        feat.values = random_features(rng, T, D);
        FdmClassifierCache cache;
        const ClassPosteriors p = class_posteriors(fdm, feat, cache);
        for (std::size_t t = 0; t < T; ++t)
            for (int k = 0; k < 3; ++k)
                REQUIRE(p.p(t, k) == Catch::Approx(1.0 / 3.0).margin(1e-12));
    }

    SECTION("saturated logits concentrate the posterior") {
        Fdm fdm;
        fdm.init(rng, D);
        fdm.Wcls.zero();
        fdm.Wdirect.zero();
        fdm.bcls(0) = 10.0;
        fdm.bcls(1) = -10.0;
        fdm.bcls(2) = -10.0;
        FeatureSequence feat;
        feat.values = random_features(rng, T, D);
        FdmClassifierCache cache;
        const ClassPosteriors p = class_posteriors(fdm, feat, cache);
        for (std::size_t t = 0; t < T; ++t) {
            REQUIRE(p.p(t, 0) == Catch::Approx(1.0).margin(1e-8));
            REQUIRE(p.p(t, 1) == Catch::Approx(0.0).margin(1e-8));
        }
    }

    SECTION("columns sum to one for random logits") {
        Fdm fdm;
        fdm.init(rng, D);
        fdm.Wdirect.fill_randn(rng, 1.0);
        fdm.Wcls.fill_randn(rng, 1.0);
        FeatureSequence feat;
        feat.values = random_features(rng, T, D);
        FdmClassifierCache cache;
        const ClassPosteriors p = class_posteriors(fdm, feat, cache);
        for (std::size_t t = 0; t < T; ++t) {
            const double s = p.p(t, 0) + p.p(t, 1) + p.p(t, 2);
            REQUIRE(s == Catch::Approx(1.0).margin(1e-9));
            for (int k = 0; k < 3; ++k) {
                REQUIRE(p.p(t, k) >= 0.0);
                REQUIRE(p.p(t, k) <= 1.0);
            }
        }
    }

    SECTION("classifier is causal") {
        Fdm fdm;
        fdm.init(rng, D);
        fdm.Wdirect.fill_randn(rng, 0.5);
        fdm.Wcls.fill_randn(rng, 0.5);
        FeatureSequence feat;
        feat.values = random_features(rng, T, D);
        FdmClassifierCache c1, c2;
        const ClassPosteriors p1 = class_posteriors(fdm, feat, c1);
        FeatureSequence feat2 = feat;
        feat2.values(T - 1, 0) += 5.0;  // future-most frame
        const ClassPosteriors p2 = class_posteriors(fdm, feat2, c2);
        for (std::size_t t = 0; t + 1 < T; ++t)
            for (int k = 0; k < 3; ++k) REQUIRE(p1.p(t, k) == p2.p(t, k));
    }

    SECTION("one-hot posteriors collapse to a single transformation") {
        Fdm fdm;
        fdm.init(rng, D);
        fdm.Wt.fill_randn(rng, 0.5);
        fdm.bt.fill_randn(rng, 0.5);
        FeatureSequence feat;
        feat.values = random_features(rng, T, D);
        ClassPosteriors p;
        p.p = Tensor{T, 3};
        for (std::size_t t = 0; t < T; ++t) p.p(t, 0) = 1.0;
        FdmApplyCache cache;
        const FeatureSequence out = fdm_apply(fdm, feat, p, cache);
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<double> expect(D);
            affine(fdm.Wt, fdm.bt, &feat.values.v[t * D], expect.data());
            for (std::size_t j = 0; j < D; ++j)
                REQUIRE(out.values(t, j) == Catch::Approx(expect[j]).margin(1e-12));
        }
    }

    SECTION("identity maps make fdm_apply the identity for any valid posteriors") {
        Fdm fdm;
        fdm.init(rng, D);  // maps initialize to identity
        FeatureSequence feat;
        feat.values = random_features(rng, T, D);
        ClassPosteriors p;
        p.p = Tensor{T, 3};
        for (std::size_t t = 0; t < T; ++t) {
            double row[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
            const double s = row[0] + row[1] + row[2];
            for (int k = 0; k < 3; ++k) p.p(t, k) = row[k] / s;
        }
        FdmApplyCache cache;
        const FeatureSequence out = fdm_apply(fdm, feat, p, cache);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            REQUIRE(out.values.v[i] == Catch::Approx(feat.values.v[i]).margin(1e-12));
    }

    SECTION("random maps match a per-frame oracle; output stays in the hull") {
        Fdm fdm;
        fdm.init(rng, D);
        fdm.Wt.fill_randn(rng, 0.7);
        fdm.Wn.fill_randn(rng, 0.7);
        fdm.Wo.fill_randn(rng, 0.7);
        fdm.bt.fill_randn(rng, 0.3);
        fdm.bn.fill_randn(rng, 0.3);
        fdm.bo.fill_randn(rng, 0.3);
        FeatureSequence feat;
        feat.values = random_features(rng, T, D);
        ClassPosteriors p;
        p.p = Tensor{T, 3};
        for (std::size_t t = 0; t < T; ++t) {
            double row[3] = {0.1 + rng.uniform(), 0.1 + rng.uniform(), 0.1 + rng.uniform()};
            const double s = row[0] + row[1] + row[2];
            for (int k = 0; k < 3; ++k) p.p(t, k) = row[k] / s;
        }
        FdmApplyCache cache;
        const FeatureSequence out = fdm_apply(fdm, feat, p, cache);
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<double> ft(D), fn(D), fo(D);
            affine(fdm.Wt, fdm.bt, &feat.values.v[t * D], ft.data());
            affine(fdm.Wn, fdm.bn, &feat.values.v[t * D], fn.data());
            affine(fdm.Wo, fdm.bo, &feat.values.v[t * D], fo.data());
            for (std::size_t j = 0; j < D; ++j) {
                const double expect =
                    p.p(t, 0) * ft[j] + p.p(t, 1) * fn[j] + p.p(t, 2) * fo[j];
                REQUIRE(out.values(t, j) == Catch::Approx(expect).margin(1e-12));
                const double lo = std::min({ft[j], fn[j], fo[j]});
                const double hi = std::max({ft[j], fn[j], fo[j]});
                REQUIRE(out.values(t, j) >= lo - 1e-12);
                REQUIRE(out.values(t, j) <= hi + 1e-12);
            }
        }
    }

    SECTION("masking: zero maps with ground-truth one-hot kill N-frame energy") {
        Fdm fdm;
        fdm.init(rng, D);
        fdm.Wn.zero();
        fdm.bn.zero();
        fdm.Wo.zero();
        fdm.bo.zero();
        FeatureSequence feat;
        feat.values = random_features(rng, T, D);
        ClassPosteriors p;
        p.p = Tensor{T, 3};
        std::vector<FrameClass> truth(T);
        for (std::size_t t = 0; t < T; ++t) {
            truth[t] = static_cast<FrameClass>(rng.uniform_int(3));
            p.p(t, static_cast<int>(truth[t])) = 1.0;
        }
        FdmApplyCache cache;
        const FeatureSequence out = fdm_apply(fdm, feat, p, cache);
        for (std::size_t t = 0; t < T; ++t) {
            if (truth[t] != FrameClass::NonTarget) continue;
            double e = 0.0;
            for (std::size_t j = 0; j < D; ++j) e += out.values(t, j) * out.values(t, j);
            REQUIRE(e == 0.0);
        }
    }

    SECTION("frame count mismatch rejected") {
        Fdm fdm;
        fdm.init(rng, D);
        FeatureSequence feat;
        feat.values = random_features(rng, T, D);
        ClassPosteriors p;
        p.p = Tensor{T + 1, 3};
        FdmApplyCache cache;
        CHECK_THROWS_AS(fdm_apply(fdm, feat, p, cache), std::invalid_argument);
    }

    SECTION("predict_frame_classes argmax and tie rule") {
        ClassPosteriors p;
        p.p = Tensor{3, 3};
        p.p(0, 0) = 0.5;
        p.p(0, 1) = 0.3;
        p.p(0, 2) = 0.2;
        for (int k = 0; k < 3; ++k) p.p(1, k) = 1.0 / 3.0;
        p.p(2, 0) = 0.2;
        p.p(2, 1) = 0.2;
        p.p(2, 2) = 0.6;
        const FrameLabelSequence seq = predict_frame_classes(p);
        CHECK(seq.labels[0] == FrameClass::Target);
        CHECK(seq.labels[1] == FrameClass::Target);  // tie breaks toward T
        CHECK(seq.labels[2] == FrameClass::Overlap);

        // random posteriors against a brute-force argmax
        Rng r2(9);
        ClassPosteriors q;
        q.p = Tensor{50, 3};
        for (std::size_t t = 0; t < 50; ++t) {
            double row[3] = {r2.uniform(), r2.uniform(), r2.uniform()};
            const double s = row[0] + row[1] + row[2];
            for (int k = 0; k < 3; ++k) q.p(t, k) = row[k] / s;
        }
        const FrameLabelSequence got = predict_frame_classes(q);
        for (std::size_t t = 0; t < 50; ++t) {
            int best = 0;
            for (int k = 1; k < 3; ++k)
                if (q.p(t, k) > q.p(t, best)) best = k;
            REQUIRE(static_cast<int>(got.labels[t]) == best);
        }
    }
}
