// Full system assembly: frontend (oracle delay-and-sum + log-mel, or the
// Mix Block on raw waveforms), optional FDM adapter, diagonal Gaussian
// enhancement policy, and the recognizer. Provides the per-scene forward and
// backward passes used by supervised training, GRPO, and evaluation.
#pragma once

#include <string>

#include "sidetalk/asr.hpp"
#include "sidetalk/beamform.hpp"
#include "sidetalk/checkpoint.hpp"
#include "sidetalk/fdm.hpp"
#include "sidetalk/grpo.hpp"
#include "sidetalk/mel.hpp"
#include "sidetalk/mix_block.hpp"
#include "sidetalk/scene.hpp"
#include "sidetalk/wer.hpp"

namespace sidetalk {

// fixed affine standardization of log-mel features (calibrated once against
// the synthetic scene distribution)
constexpr double kLogMelShift = 4.5;
constexpr double kLogMelScale = 0.4;

enum class FrontendKind { BeamformLogMel, MixBlockRaw };

struct PipelineConfig {
    FrontendKind frontend = FrontendKind::BeamformLogMel;
    bool use_fdm = false;
    std::size_t feat_dim = 32;  // mel bins / Mix Block features
    std::size_t enc_hidden = 24, enc_state = 4, ctx_len = 4;
    std::size_t mix_state = 4;
    std::size_t fdm_hidden = 12, fdm_state = 4;
    std::size_t emb = 24, attn = 24, dec_state = 32;
    int max_decode_len = 12;
    double policy_log_std_init = -1.0;
    std::uint64_t init_seed = 1;
};

struct Pipeline {
    PipelineConfig cfg;
    MicArrayGeometry geometry;
    MelConfig mel;
    std::vector<long> steering;  // oracle wearer steering, fixed constants
    MixBlock mix;
    Fdm fdm;
    Tensor policy_log_std, gpolicy_log_std;
    ToyAsrModel asr;

    void init(const PipelineConfig& c) {
        cfg = c;
        geometry = build_geometry();
        mel.mel_bins = static_cast<int>(cfg.feat_dim);
        steering = steering_delays(geometry, wearer_mouth_position());
        Rng rng(cfg.init_seed);
        Rng rmix = rng.derive(1), rfdm = rng.derive(2), rasr = rng.derive(3);
        if (cfg.frontend == FrontendKind::MixBlockRaw)
            mix.init(rmix, geometry.num_mics(), cfg.feat_dim, cfg.mix_state, cfg.ctx_len);
        if (cfg.use_fdm) fdm.init(rfdm, cfg.feat_dim, cfg.fdm_hidden, cfg.fdm_state, cfg.ctx_len);
        policy_log_std = Tensor{cfg.feat_dim};
        policy_log_std.fill(cfg.policy_log_std_init);
        asr.init(rasr, cfg.feat_dim, cfg.enc_hidden, cfg.enc_state, cfg.ctx_len, cfg.emb,
                 cfg.attn, cfg.dec_state);
    }

    // full parameter set; ordering is the checkpoint layout
    ParamSet params() {
        ParamSet ps;
        if (cfg.frontend == FrontendKind::MixBlockRaw) mix.collect(ps, "mix");
        if (cfg.use_fdm) fdm.collect(ps, "fdm");
        add_param(ps, "policy_log_std", policy_log_std, gpolicy_log_std);
        asr.collect(ps, "asr");
        return ps;
    }

    // enhancement stack only: Mix Block + FDM + policy log-std
    ParamSet enhancement_params() {
        ParamSet ps;
        if (cfg.frontend == FrontendKind::MixBlockRaw) mix.collect(ps, "mix");
        if (cfg.use_fdm) fdm.collect(ps, "fdm");
        add_param(ps, "policy_log_std", policy_log_std, gpolicy_log_std);
        return ps;
    }

    // supervised phase: recognizer plus whatever enhancement modules exist
    // (the policy log-std is shaped only by GRPO)
    ParamSet supervised_params() {
        ParamSet ps;
        if (cfg.frontend == FrontendKind::MixBlockRaw) mix.collect(ps, "mix");
        if (cfg.use_fdm) fdm.collect(ps, "fdm");
        asr.collect(ps, "asr");
        return ps;
    }
};

// ---------------------------------------------------------------------------
// Per-scene forward state
// ---------------------------------------------------------------------------

struct SceneForward {
    FeatureSequence frontend_feat;  // (T, d)
    MixBlockCache mix_cache;
    FdmClassifierCache cls_cache;
    ClassPosteriors post;            // posteriors driving the mixture
    FdmApplyCache apply_cache;
    FeatureSequence enhanced;        // policy mean (equals frontend when no FDM)
};

inline FeatureSequence frontend_features(const Pipeline& p, const LabeledScene& scene,
                                         SceneForward& fwd) {
    if (p.cfg.frontend == FrontendKind::MixBlockRaw) {
        fwd.frontend_feat = mix_block_forward(p.mix, scene.waves, fwd.mix_cache);
    } else {
        const std::vector<double> mono = delay_and_sum(scene.waves, p.steering);
        fwd.frontend_feat = log_mel(mono, p.mel, scene.waves.sample_rate);
        for (double& v : fwd.frontend_feat.values.v) v = (v + kLogMelShift) * kLogMelScale;
    }
    return fwd.frontend_feat;
}

// frontend -> posteriors -> class-mixed enhancement (the policy mean)
inline void enhance(const Pipeline& p, SceneForward& fwd) {
    if (!p.cfg.use_fdm) {
        fwd.enhanced = fwd.frontend_feat;
        return;
    }
    fwd.post = class_posteriors(p.fdm, fwd.frontend_feat, fwd.cls_cache);
    fwd.enhanced = fdm_apply(p.fdm, fwd.frontend_feat, fwd.post, fwd.apply_cache);
}

inline void run_scene_forward(const Pipeline& p, const LabeledScene& scene, SceneForward& fwd) {
    frontend_features(p, scene, fwd);
    enhance(p, fwd);
}

// Backward from a gradient on the enhanced features down through FDM and the
// Mix Block (parameter grads accumulate in place).
inline void enhancement_backward(Pipeline& p, const LabeledScene& scene, const SceneForward& fwd,
                                 const Tensor& denhanced, const Tensor* dpost_extra = nullptr) {
    const std::size_t T = fwd.frontend_feat.num_frames(), D = p.cfg.feat_dim;
    Tensor dfrontend{T, D};
    if (p.cfg.use_fdm) {
        Tensor dpost{T, 3};
        fdm_apply_backward(p.fdm, fwd.frontend_feat, fwd.post, fwd.apply_cache, denhanced,
                           dfrontend, dpost);
        if (dpost_extra)
            for (std::size_t i = 0; i < dpost.size(); ++i) dpost.v[i] += dpost_extra->v[i];
        class_posteriors_backward(p.fdm, fwd.cls_cache, dpost, dfrontend);
    } else {
        dfrontend = denhanced;
    }
    if (p.cfg.frontend == FrontendKind::MixBlockRaw)
        mix_block_backward(p.mix, scene.waves, fwd.mix_cache, dfrontend);
    // the log-mel path has no trainable parameters upstream
}

// ---------------------------------------------------------------------------
// Supervised objective: teacher-forced NLL plus (when FDM is present)
// cross-entropy of the mixing posteriors against ground-truth frame labels.
// ---------------------------------------------------------------------------

struct SupervisedLoss {
    double nll = 0.0;
    double ce = 0.0;
    double total(double ce_weight) const { return nll + ce_weight * ce; }
};

inline SupervisedLoss supervised_scene_step(Pipeline& p, const LabeledScene& scene,
                                            double ce_weight, bool do_backward) {
    SceneForward fwd;
    run_scene_forward(p, scene, fwd);

    EncodeCache enc_cache;
    const Tensor enc = encode(p.asr, fwd.enhanced, enc_cache);
    const std::vector<int> ref = target_tokens(scene.reference_transcript);
    DecoderCache dec_cache;
    SupervisedLoss loss;
    loss.nll = teacher_forced_loss(p.asr, enc, ref, dec_cache);

    const std::size_t T = fwd.enhanced.num_frames();
    Tensor dpost{T, 3};
    if (p.cfg.use_fdm) {
        for (std::size_t t = 0; t < T; ++t) {
            const int truth = static_cast<int>(scene.frame_labels.labels[t]);
            loss.ce -= std::log(std::max(fwd.post.p(t, truth), 1e-12));
        }
        loss.ce /= static_cast<double>(T);
    }

    if (do_backward) {
        Tensor denc{T, p.cfg.feat_dim};
        teacher_forced_backward(p.asr, dec_cache, ref, denc);
        Tensor denhanced{T, p.cfg.feat_dim};
        encode_backward(p.asr, enc_cache, denc, denhanced);
        if (p.cfg.use_fdm) {
            for (std::size_t t = 0; t < T; ++t) {
                const int truth = static_cast<int>(scene.frame_labels.labels[t]);
                dpost(t, truth) -=
                    ce_weight / (static_cast<double>(T) *
                                 std::max(fwd.post.p(t, truth), 1e-12));
            }
            enhancement_backward(p, scene, fwd, denhanced, &dpost);
        } else {
            enhancement_backward(p, scene, fwd, denhanced);
        }
    }
    return loss;
}

// ---------------------------------------------------------------------------
// GRPO per-scene step
// ---------------------------------------------------------------------------

struct GrpoSceneStats {
    GroupStats stats;
    double mean_r_frame = 0.0, mean_r_utt = 0.0, mean_r_wer = 0.0, mean_wer = 0.0;
};

// Samples a group from the current policy, scores it with the three rewards,
// and (optionally) accumulates the ascent gradient into the enhancement
// parameters. The recognizer is frozen here.
inline GrpoSceneStats grpo_scene_step(Pipeline& p, const LabeledScene& scene,
                                      const GrpoConfig& cfg, const Rng& noise_rng,
                                      bool do_backward) {
    SceneForward fwd;
    run_scene_forward(p, scene, fwd);
    const Tensor& mean = fwd.enhanced.values;
    const std::vector<PolicySample> samples =
        sample_group(mean, p.policy_log_std, cfg.group_size, noise_rng);

    GrpoSceneStats out;
    std::vector<double> rewards(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j) {
        FeatureSequence zfeat;
        zfeat.values = samples[j].z;
        zfeat.frame_hop = fwd.enhanced.frame_hop;

        RewardBreakdown rb;
        if (p.cfg.use_fdm) {
            FdmClassifierCache cls;
            const ClassPosteriors post = class_posteriors(p.fdm, zfeat, cls);
            const FrameLabelSequence pred = predict_frame_classes(post);
            rb.r_frame = reward_frame(pred.labels, scene.frame_labels.labels, cfg.beta);
            rb.r_utt = reward_utterance(dominant_class(pred.labels), scene.utt_label.dominant);
        } else {
            const std::vector<FrameClass> all_t(scene.frame_labels.labels.size(),
                                                FrameClass::Target);
            rb.r_frame = reward_frame(all_t, scene.frame_labels.labels, cfg.beta);
            rb.r_utt = reward_utterance(FrameClass::Target, scene.utt_label.dominant);
        }

        EncodeCache enc_cache;
        const Tensor enc = encode(p.asr, zfeat, enc_cache);
        const TokenSequence hyp = decode_greedy(p.asr, enc, p.cfg.max_decode_len);
        const double w = wer(scene.reference_transcript, hyp.words());
        rb.r_wer = reward_wer(w);
        rb.composite = composite_reward(rb.r_frame, rb.r_utt, rb.r_wer, cfg);
        rewards[j] = rb.composite;

        out.mean_r_frame += rb.r_frame;
        out.mean_r_utt += rb.r_utt;
        out.mean_r_wer += rb.r_wer;
        out.mean_wer += w;
    }
    const double invG = 1.0 / static_cast<double>(samples.size());
    out.mean_r_frame *= invG;
    out.mean_r_utt *= invG;
    out.mean_r_wer *= invG;
    out.mean_wer *= invG;

    const std::vector<double> advantages = normalize_advantages(rewards, &out.stats);

    if (do_backward) {
        const std::size_t T = mean.dims[0], D = mean.dims[1];
        Tensor dmean{T, D}, dlog_std{D};
        grpo_score_upstream(mean, p.policy_log_std, samples, advantages, dmean, dlog_std);
        // ascent -> minimization convention for the optimizer
        for (double& g : dmean.v) g = -g;
        for (std::size_t f = 0; f < D; ++f) p.gpolicy_log_std(f) -= dlog_std(f);
        enhancement_backward(p, scene, fwd, dmean);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Deterministic evaluation of one scene
// ---------------------------------------------------------------------------

struct SceneEval {
    std::vector<std::string> hypothesis;
    double wer_value = 0.0;
    std::size_t edits = 0;
    double frame_accuracy = 0.0;
    FrameClass predicted_dominant = FrameClass::Target;
};

inline SceneEval evaluate_scene(const Pipeline& p, const LabeledScene& scene) {
    SceneForward fwd;
    run_scene_forward(p, scene, fwd);

    SceneEval ev;
    std::vector<FrameClass> pred;
    if (p.cfg.use_fdm) {
        // sigma -> 0 limit of the reward path: classify the deterministic mean
        FdmClassifierCache cls;
        const ClassPosteriors post = class_posteriors(p.fdm, fwd.enhanced, cls);
        pred = predict_frame_classes(post).labels;
    } else {
        pred.assign(scene.frame_labels.labels.size(), FrameClass::Target);
    }
    std::size_t correct = 0;
    for (std::size_t t = 0; t < pred.size(); ++t)
        if (pred[t] == scene.frame_labels.labels[t]) ++correct;
    ev.frame_accuracy = pred.empty() ? 0.0 : static_cast<double>(correct) / pred.size();
    ev.predicted_dominant = dominant_class(pred);

    EncodeCache enc_cache;
    const Tensor enc = encode(p.asr, fwd.enhanced, enc_cache);
    const TokenSequence hyp = decode_greedy(p.asr, enc, p.cfg.max_decode_len);
    ev.hypothesis = hyp.words();
    ev.edits = edit_distance(scene.reference_transcript, ev.hypothesis);
    ev.wer_value = wer(scene.reference_transcript, ev.hypothesis);
    return ev;
}

}  // namespace sidetalk
