// Synthetic labeled multi-microphone scenes.
//
// A scene is built from a word-audio bank of fixed narrowband bursts (one per
// vocabulary word, 0.25 s each), propagated to the array with integer-sample
// delays and 1/r gains, level-normalized per source, summed with shaped noise,
// and quantized to the 16-bit grid. Frame labels follow the T/N/O scheme with
// silence assigned to T.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidetalk/geometry.hpp"
#include "sidetalk/tensor.hpp"
#include "sidetalk/vocab.hpp"

namespace sidetalk {

constexpr int kFrameHop = 160;          // 10 ms at 16 kHz
constexpr int kWordSamples = 4000;      // 0.25 s per word token
constexpr int kWordFrames = kWordSamples / kFrameHop;
constexpr double kWearerRms = 0.05;     // array-average RMS target for the wearer
constexpr double kNoiseRefDb = 90.0;    // SPL value mapped to 0 dB relative to wearer RMS

enum class FrameClass : int { Target = 0, NonTarget = 1, Overlap = 2 };

inline char class_to_char(FrameClass c) {
    switch (c) {
        case FrameClass::Target: return 'T';
        case FrameClass::NonTarget: return 'N';
        case FrameClass::Overlap: return 'O';
    }
    return '?';
}

inline FrameClass class_from_char(char c) {
    switch (c) {
        case 'T': return FrameClass::Target;
        case 'N': return FrameClass::NonTarget;
        case 'O': return FrameClass::Overlap;
        default: throw std::invalid_argument(std::string("unknown class token '") + c + "'");
    }
}

struct FrameLabelSequence {
    std::vector<FrameClass> labels;
    int hop_samples = kFrameHop;
};

struct MultiChannelWaveform {
    std::vector<std::vector<double>> channels;
    double sample_rate = 16000.0;

    std::size_t num_channels() const { return channels.size(); }
    std::size_t num_samples() const { return channels.empty() ? 0 : channels[0].size(); }
};

struct UtteranceLabel {
    FrameClass dominant = FrameClass::Target;
};

struct LabeledScene {
    MultiChannelWaveform waves;
    FrameLabelSequence frame_labels;
    UtteranceLabel utt_label;
    std::vector<std::string> reference_transcript;  // wearer speech only
};

// (source id, start frame, end frame); source 0 is the wearer. A source with
// no plan entry stays silent for the whole scene.
struct OverlapEntry {
    int source_id = 0;
    int start_frame = 0;
    int end_frame = 0;
};

struct SceneSpec {
    std::vector<std::string> wearer_text;
    std::vector<std::vector<std::string>> bystander_texts;
    std::vector<SourcePose> bystander_poses;
    double noise_level_db = 60.0;  // [30, 90], relative to wearer RMS (90 -> 0 dB)
    std::vector<OverlapEntry> overlap_plan;
    std::uint64_t rng_seed = 0;
};

// ---------------------------------------------------------------------------
// Word audio bank: fixed pseudo-random narrowband bursts, one per word.
// Center frequencies are mel-spaced over [300, 6000] Hz; each burst is three
// detuned sinusoids with hashed phases under a raised-sine envelope, so every
// occurrence of a word is the same waveform.
// ---------------------------------------------------------------------------

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

inline double word_center_freq(int word_index) {
    const double lo = hz_to_mel(300.0), hi = hz_to_mel(6000.0);
    const double m = lo + (hi - lo) * word_index / static_cast<double>(kNumWords - 1);
    return mel_to_hz(m);
}

struct WordAudioBank {
    std::vector<std::vector<double>> waves;  // indexed like word_list()
    double sample_rate = 16000.0;

    const std::vector<double>& wave_for(const std::string& word) const {
        return waves.at(static_cast<std::size_t>(word_to_token(word) - 2));
    }
};

inline WordAudioBank make_word_bank(double sample_rate = 16000.0) {
    WordAudioBank bank;
    bank.sample_rate = sample_rate;
    bank.waves.resize(kNumWords);
    const int ramp = 400;
    for (int w = 0; w < kNumWords; ++w) {
        const double f0 = word_center_freq(w);
        std::vector<double>& x = bank.waves[w];
        x.assign(kWordSamples, 0.0);
        const double detune[3] = {0.96, 1.0, 1.04};
        const double amp[3] = {0.5, 1.0, 0.5};
        double phase[3];
        for (int k = 0; k < 3; ++k)
            phase[k] = 2.0 * M_PI *
                       (static_cast<double>(splitmix64(31ULL * w + k) >> 11) * 0x1.0p-53);
        for (int n = 0; n < kWordSamples; ++n) {
            double env = 1.0;
            if (n < ramp) {
                const double r = std::sin(0.5 * M_PI * n / ramp);
                env = r * r;
            } else if (n >= kWordSamples - ramp) {
                const double r = std::sin(0.5 * M_PI * (kWordSamples - 1 - n) / ramp);
                env = r * r;
            }
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += amp[k] * std::sin(2.0 * M_PI * f0 * detune[k] * n / sample_rate + phase[k]);
            x[n] = env * s / 2.0;
        }
    }
    return bank;
}

inline std::vector<double> render_text(const WordAudioBank& bank,
                                       const std::vector<std::string>& words) {
    std::vector<double> out;
    out.reserve(words.size() * kWordSamples);
    for (const auto& w : words) {
        const auto& wave = bank.wave_for(w);
        out.insert(out.end(), wave.begin(), wave.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Propagation: per-mic integer-sample delay (round(dist/c*fs)) and 1/r gain
// relative to 1 m. Output length = input length + max delay.
// ---------------------------------------------------------------------------

inline MultiChannelWaveform propagate(const std::vector<double>& source_wave,
                                      const Vec3& position, const MicArrayGeometry& geometry) {
    const std::size_t m = geometry.num_mics();
    std::vector<long> delays(m);
    std::vector<double> gains(m);
    long max_delay = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = distance(position, geometry.mic_positions[i]);
        if (d <= 0.0) throw std::invalid_argument("source coincides with a microphone");
        delays[i] = std::lround(d / geometry.speed_of_sound * geometry.sample_rate);
        gains[i] = 1.0 / d;
        max_delay = std::max(max_delay, delays[i]);
    }
    MultiChannelWaveform out;
    out.sample_rate = geometry.sample_rate;
    out.channels.assign(m, std::vector<double>(source_wave.size() + max_delay, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double>& ch = out.channels[i];
        const long d = delays[i];
        const double g = gains[i];
        for (std::size_t n = 0; n < source_wave.size(); ++n) ch[n + d] = g * source_wave[n];
    }
    return out;
}

inline std::vector<long> propagation_delays(const Vec3& position,
                                            const MicArrayGeometry& geometry) {
    std::vector<long> delays(geometry.num_mics());
    for (std::size_t i = 0; i < geometry.num_mics(); ++i) {
        const double d = distance(position, geometry.mic_positions[i]);
        if (d <= 0.0) throw std::invalid_argument("source coincides with a microphone");
        delays[i] = std::lround(d / geometry.speed_of_sound * geometry.sample_rate);
    }
    return delays;
}

// ---------------------------------------------------------------------------
// Frame labels from sample-level activity masks.
// wearer only -> T, non-target only -> N, both -> O, neither -> T.
// ---------------------------------------------------------------------------

inline FrameLabelSequence frame_labels_from_activity(
    const std::vector<std::uint8_t>& wearer_mask,
    const std::vector<std::vector<std::uint8_t>>& bystander_masks, int hop) {
    for (const auto& bm : bystander_masks)
        if (bm.size() != wearer_mask.size())
            throw std::invalid_argument("activity mask length mismatch");
    if (hop <= 0) throw std::invalid_argument("hop must be positive");
    FrameLabelSequence seq;
    seq.hop_samples = hop;
    const std::size_t n = wearer_mask.size();
    const std::size_t frames = (n + hop - 1) / hop;
    seq.labels.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t lo = f * hop, hi = std::min(n, lo + hop);
        bool w = false, b = false;
        for (std::size_t s = lo; s < hi; ++s) {
            w = w || wearer_mask[s];
            for (const auto& bm : bystander_masks) b = b || bm[s];
            if (w && b) break;
        }
        if (w && b)
            seq.labels.push_back(FrameClass::Overlap);
        else if (b)
            seq.labels.push_back(FrameClass::NonTarget);
        else
            seq.labels.push_back(FrameClass::Target);  // wearer-only and silence
    }
    return seq;
}

inline FrameClass dominant_label(const std::vector<FrameClass>& labels) {
    if (labels.empty()) throw std::invalid_argument("dominant label of empty sequence");
    int counts[3] = {0, 0, 0};
    for (FrameClass c : labels) counts[static_cast<int>(c)]++;
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (counts[k] > counts[best]) best = k;  // ties keep the earlier class
    return static_cast<FrameClass>(best);
}

// ---------------------------------------------------------------------------
// mix_scene
// ---------------------------------------------------------------------------

namespace detail {

inline void quantize_to_i16_grid(std::vector<double>& x) {
    for (double& v : x) {
        double q = std::round(v * 32768.0);
        q = std::clamp(q, -32768.0, 32767.0);
        v = q / 32768.0;
    }
}

// array-average RMS over a sample span, across channels
inline double array_rms(const MultiChannelWaveform& w, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& ch : w.channels) {
        const std::size_t e = std::min(hi, ch.size());
        for (std::size_t i = lo; i < e; ++i) {
            s += ch[i] * ch[i];
            ++n;
        }
    }
    return n ? std::sqrt(s / static_cast<double>(n)) : 0.0;
}

}  // namespace detail

inline LabeledScene mix_scene(const SceneSpec& spec, const MicArrayGeometry& geometry,
                              const WordAudioBank& bank) {
    if (spec.wearer_text.empty()) throw std::invalid_argument("wearer text must be nonempty");
    if (spec.bystander_texts.size() != spec.bystander_poses.size())
        throw std::invalid_argument("bystander texts/poses count mismatch");
    const int num_sources = 1 + static_cast<int>(spec.bystander_texts.size());

    // per-source word counts for plan validation
    std::vector<int> words_of(num_sources);
    words_of[0] = static_cast<int>(spec.wearer_text.size());
    for (int b = 0; b < num_sources - 1; ++b)
        words_of[b + 1] = static_cast<int>(spec.bystander_texts[b].size());

    int total_frames = 40;  // noise-only floor
    for (const auto& e : spec.overlap_plan) {
        if (e.source_id < 0 || e.source_id >= num_sources)
            throw std::invalid_argument("overlap plan references unknown source");
        if (e.start_frame < 0 || e.end_frame <= e.start_frame)
            throw std::invalid_argument("overlap plan interval empty or negative");
        if (e.end_frame - e.start_frame != words_of[e.source_id] * kWordFrames)
            throw std::invalid_argument("overlap plan span does not match text length");
        total_frames = std::max(total_frames, e.end_frame + 12);
    }
    const std::size_t total_samples = static_cast<std::size_t>(total_frames) * kFrameHop;

    Rng rng(spec.rng_seed);
    Rng noise_rng = rng.derive(1);
    Rng level_rng = rng.derive(2);

    const std::size_t m = geometry.num_mics();
    MultiChannelWaveform mix;
    mix.sample_rate = geometry.sample_rate;
    mix.channels.assign(m, std::vector<double>(total_samples, 0.0));

    std::vector<std::uint8_t> wearer_mask(total_samples, 0);
    std::vector<std::vector<std::uint8_t>> bystander_masks;
    bool wearer_active = false;

    for (const auto& e : spec.overlap_plan) {
        const bool is_wearer = e.source_id == 0;
        const std::vector<std::string>& text =
            is_wearer ? spec.wearer_text : spec.bystander_texts[e.source_id - 1];
        const Vec3 pos = is_wearer ? wearer_mouth_position()
                                   : place_source(spec.bystander_poses[e.source_id - 1]);
        const std::vector<double> dry = render_text(bank, text);
        MultiChannelWaveform prop = propagate(dry, pos, geometry);

        // level-normalize: array-average RMS over the nominal span -> target
        const double raw = detail::array_rms(prop, 0, dry.size());
        double target = kWearerRms;
        if (!is_wearer) target *= level_rng.uniform(0.7, 1.25);
        const double scale = raw > 0.0 ? target / raw : 0.0;

        const std::size_t offset = static_cast<std::size_t>(e.start_frame) * kFrameHop;
        for (std::size_t c = 0; c < m; ++c) {
            const auto& src = prop.channels[c];
            auto& dst = mix.channels[c];
            for (std::size_t n = 0; n < src.size() && offset + n < total_samples; ++n)
                dst[offset + n] += scale * src[n];
        }

        // activity from the plan (frame-grid exact, delays < one hop)
        const std::size_t a_lo = offset;
        const std::size_t a_hi =
            std::min<std::size_t>(total_samples, static_cast<std::size_t>(e.end_frame) * kFrameHop);
        if (is_wearer) {
            std::fill(wearer_mask.begin() + a_lo, wearer_mask.begin() + a_hi, 1);
            wearer_active = true;
        } else {
            bystander_masks.emplace_back(total_samples, 0);
            std::fill(bystander_masks.back().begin() + a_lo, bystander_masks.back().begin() + a_hi,
                      1);
        }
    }

    // shaped noise: white Gaussian through a single-pole lowpass, per channel
    const double noise_rms = kWearerRms * std::pow(10.0, (spec.noise_level_db - kNoiseRefDb) / 20.0);
    const double pole = 0.6;
    for (std::size_t c = 0; c < m; ++c) {
        Rng ch_rng = noise_rng.derive(c);
        std::vector<double> noise(total_samples);
        double state = 0.0;
        for (std::size_t n = 0; n < total_samples; ++n) {
            state = pole * state + (1.0 - pole) * ch_rng.normal();
            noise[n] = state;
        }
        const double nr = rms(noise);
        const double g = nr > 0.0 ? noise_rms / nr : 0.0;
        auto& dst = mix.channels[c];
        for (std::size_t n = 0; n < total_samples; ++n) dst[n] += g * noise[n];
    }

    for (auto& ch : mix.channels) detail::quantize_to_i16_grid(ch);

    LabeledScene scene;
    scene.waves = std::move(mix);
    scene.frame_labels = frame_labels_from_activity(wearer_mask, bystander_masks, kFrameHop);
    scene.utt_label.dominant = dominant_label(scene.frame_labels.labels);
    if (wearer_active) scene.reference_transcript = spec.wearer_text;
    return scene;
}

}  // namespace sidetalk
