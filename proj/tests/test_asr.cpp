// Recognizer semantics: loss values, greedy decode, encoder invariants,
// optimizer behavior, checkpoint round-trips, and the single-scene overfit
// smoke test.
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "sidetalk/asr.hpp"
#include "sidetalk/checkpoint.hpp"
#include "sidetalk/optim.hpp"
#include "sidetalk/pipeline.hpp"
#include "sidetalk/scene.hpp"

using namespace sidetalk;

namespace {

ToyAsrModel small_model(Rng& rng, std::size_t d = 6) {
    ToyAsrModel m;
    m.init(rng, d, 4, 3, 3, 5, 5, 6);
    return m;
}

LabeledScene demo_scene(std::uint64_t seed) {
    const MicArrayGeometry g = build_geometry();
    const WordAudioBank bank = make_word_bank();
    SceneSpec spec;
    spec.wearer_text = {"alpha", "tango", "five"};
    spec.bystander_texts = {{"kilo", "lima"}};
    spec.bystander_poses = {{135.0, 0.5, 0.0, 0.0}};
    spec.noise_level_db = 60.0;
    spec.overlap_plan = {{0, 8, 8 + 3 * kWordFrames}, {1, 40, 40 + 2 * kWordFrames}};
    spec.rng_seed = seed;
    return mix_scene(spec, g, bank);
}

}  // namespace

TEST_CASE("teacher-forced loss at uniform initialization equals log |V|") {
    Rng rng(50);
    const ToyAsrModel m = small_model(rng);
    Tensor enc{10, 6};
    enc.fill_randn(rng, 1.0);
    DecoderCache cache;
    const std::vector<int> ref = {word_to_token("alpha"), word_to_token("bravo"), kEosId};
    const double loss = teacher_forced_loss(m, enc, ref, cache);
    CHECK(loss == Catch::Approx(std::log(static_cast<double>(kVocabSize))).epsilon(1e-12));

    // single end-token reference: one position, same uniform NLL
    const double loss1 = teacher_forced_loss(m, enc, {kEosId}, cache);
    CHECK(loss1 == Catch::Approx(std::log(static_cast<double>(kVocabSize))).epsilon(1e-12));
}

TEST_CASE("teacher-forced loss input validation") {
    Rng rng(51);
    const ToyAsrModel m = small_model(rng);
    Tensor enc{4, 6};
    DecoderCache cache;
    CHECK_THROWS_AS(teacher_forced_loss(m, enc, {}, cache), std::invalid_argument);
    CHECK_THROWS_AS(teacher_forced_loss(m, enc, {kVocabSize}, cache), std::invalid_argument);
    CHECK_THROWS_AS(teacher_forced_loss(m, enc, {-1}, cache), std::invalid_argument);
}

TEST_CASE("greedy decode terminates, is well-formed and deterministic") {
    Rng rng(52);
    ToyAsrModel m = small_model(rng);
    m.Wvoc.fill_randn(rng, 0.4);
    m.bvoc.fill_randn(rng, 0.1);
    Tensor enc{12, 6};
    enc.fill_randn(rng, 1.0);
    const TokenSequence a = decode_greedy(m, enc, 7);
    const TokenSequence b = decode_greedy(m, enc, 7);
    CHECK(a.tokens == b.tokens);
    CHECK(a.tokens.front() == kBosId);
    CHECK(a.tokens.back() == kEosId);
    CHECK(a.tokens.size() <= 1 + 7 + 1);  // bos + emissions + appended eos
    CHECK_THROWS_AS(decode_greedy(m, enc, 0), std::invalid_argument);
}

TEST_CASE("encoder invariants") {
    Rng rng(53);

    SECTION("zero features produce constant (zero) states at default init") {
        const ToyAsrModel m = small_model(rng);
        FeatureSequence feat;
        feat.values = Tensor{9, 6};
        EncodeCache cache;
        const Tensor enc = encode(m, feat, cache);
        for (double v : enc.v) REQUIRE(v == 0.0);
    }

    SECTION("feature permutation with permuted input projection is invariant") {
        const std::size_t d = 6, T = 7;
        ToyAsrModel m = small_model(rng, d);
        FeatureSequence feat;
        feat.values = Tensor{T, d};
        feat.values.fill_randn(rng, 1.0);
        EncodeCache c1;
        const Tensor enc1 = encode(m, feat, c1);

        // permutation pi(j) = (j+2) mod d applied to feature rows and to the
        // columns of the input projection
        ToyAsrModel m2 = m;
        FeatureSequence feat2;
        feat2.values = Tensor{T, d};
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t j = 0; j < d; ++j) feat2.values(t, (j + 2) % d) = feat.values(t, j);
        for (std::size_t o = 0; o < d; ++o)
            for (std::size_t j = 0; j < d; ++j) m2.Wenc_in(o, (j + 2) % d) = m.Wenc_in(o, j);
        EncodeCache c2;
        const Tensor enc2 = encode(m2, feat2, c2);
        for (std::size_t i = 0; i < enc1.size(); ++i)
            REQUIRE(enc2.v[i] == Catch::Approx(enc1.v[i]).margin(1e-12));
    }

    SECTION("width mismatch rejected") {
        const ToyAsrModel m = small_model(rng);
        FeatureSequence feat;
        feat.values = Tensor{4, 7};
        EncodeCache cache;
        CHECK_THROWS_AS(encode(m, feat, cache), std::invalid_argument);
    }
}

TEST_CASE("learning-rate schedule: warmup then linear decay") {
    LrSchedule sched;
    sched.base = 1.0;
    sched.warmup = 10;
    sched.max_steps = 110;
    CHECK(sched.at(1) == Catch::Approx(0.1));
    CHECK(sched.at(10) == Catch::Approx(1.0));
    CHECK(sched.at(60) == Catch::Approx(0.5));
    CHECK(sched.at(110) == 0.0);
    CHECK(sched.at(200) == 0.0);
}

TEST_CASE("adam leaves parameters unchanged on zero gradients") {
    Rng rng(54);
    Tensor w{4, 3}, gw;
    w.fill_randn(rng, 1.0);
    ParamSet ps;
    add_param(ps, "w", w, gw);
    const std::vector<double> before = w.v;
    Adam opt;
    opt.reset(ps);
    zero_grads(ps);
    opt.step(ps, 0.1);
    CHECK(w.v == before);
}

TEST_CASE("checkpoint round-trip and mismatch diagnostics") {
    Rng rng(55);
    ToyAsrModel m = small_model(rng);
    ParamSet ps;
    m.collect(ps, "asr");
    const auto dir = std::filesystem::temp_directory_path() / "sidetalk_ckpt_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "model.ckpt").string();
    save_checkpoint(path, ps);

    ToyAsrModel m2 = small_model(rng);  // different random values
    ParamSet ps2;
    m2.collect(ps2, "asr");
    load_checkpoint(path, ps2);
    REQUIRE(m2.Wq.v == m.Wq.v);
    REQUIRE(m2.Emb.v == m.Emb.v);
    REQUIRE(m2.Wvoc.v == m.Wvoc.v);

    // different architecture: shape mismatch is an error
    Rng rng2(56);
    ToyAsrModel big;
    big.init(rng2, 8, 4, 3, 3, 5, 5, 6);
    ParamSet ps3;
    big.collect(ps3, "asr");
    CHECK_THROWS_AS(load_checkpoint(path, ps3), std::runtime_error);
}

TEST_CASE("single-scene overfit: monotone start, tiny loss, exact transcript") {
    const LabeledScene scene = demo_scene(77);

    Pipeline p;
    PipelineConfig cfg;
    cfg.use_fdm = false;
    cfg.init_seed = 9;
    p.init(cfg);

    SceneForward fwd;
    run_scene_forward(p, scene, fwd);
    const std::vector<int> ref = target_tokens(scene.reference_transcript);

    ParamSet ps;
    p.asr.collect(ps, "asr");

    auto run_step = [&](bool backward) {
        zero_grads(ps);
        EncodeCache enc_cache;
        const Tensor enc = encode(p.asr, fwd.enhanced, enc_cache);
        DecoderCache dec_cache;
        const double loss = teacher_forced_loss(p.asr, enc, ref, dec_cache);
        if (backward) {
            Tensor denc{enc.dims[0], enc.dims[1]};
            teacher_forced_backward(p.asr, dec_cache, ref, denc);
            Tensor dfeat{enc.dims[0], enc.dims[1]};
            encode_backward(p.asr, enc_cache, denc, dfeat);
        }
        return loss;
    };

    // plain gradient descent for the first 50 steps: strictly monotone
    std::vector<double> losses;
    for (int step = 0; step < 50; ++step) {
        losses.push_back(run_step(true));
        for (auto& pr : ps)
            if (pr.trainable)
                for (std::size_t i = 0; i < pr.value->size(); ++i)
                    pr.value->v[i] -= 0.02 * pr.grad->v[i];
    }
    for (std::size_t i = 1; i < losses.size(); ++i) REQUIRE(losses[i] < losses[i - 1]);

    // then Adam until the scene is memorized
    Adam opt;
    opt.reset(ps);
    LrSchedule sched;
    sched.base = 4e-3;
    sched.warmup = 60;
    sched.max_steps = 1000000;
    double last = 1e9;
    for (int step = 0; step < 600 && last >= 5e-3; ++step) {
        last = run_step(true);
        if (last < 5e-3) break;
        opt.step(ps, sched.at(step + 1));
    }
    REQUIRE(last < 0.01);

    EncodeCache enc_cache;
    const Tensor enc = encode(p.asr, fwd.enhanced, enc_cache);
    const TokenSequence hyp = decode_greedy(p.asr, enc, 12);
    CHECK(hyp.words() == scene.reference_transcript);
}
