// Multi-scale group-relative policy optimization.
//
// Rewards: exponentially weighted frame agreement, utterance dominant-class
// agreement, and clamped 1-WER, combined as a weighted sum. Advantages are
// group-normalized (population sigma; an all-equal group yields zeros). The
// policy is a diagonal Gaussian over the enhanced feature sequence with
// learned per-feature log-std; the update follows the score-function
// gradient sum over the group, advantages treated as constants.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sidetalk/scene.hpp"
#include "sidetalk/tensor.hpp"

namespace sidetalk {

struct GrpoConfig {
    std::size_t group_size = 8;        // G
    double beta = 2.0;                 // frame-weight exponent scale
    double lambda1 = 0.25, lambda2 = 0.25, lambda3 = 0.5;
    double policy_log_std_init = -1.0;
    double lr = 3e-4;

    void validate() const {
        if (group_size < 2) throw std::invalid_argument("group size must be >= 2");
        if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
        if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0)
            throw std::invalid_argument("reward weights must be nonnegative");
        if (lambda1 + lambda2 + lambda3 <= 0.0)
            throw std::invalid_argument("reward weights must sum positive");
    }
};

// w_t = exp(beta * t / T) for t = 1..T (stored 0-based).
inline std::vector<double> frame_weights(double beta, std::size_t T) {
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    std::vector<double> w(T);
    for (std::size_t i = 0; i < T; ++i)
        w[i] = std::exp(beta * static_cast<double>(i + 1) / static_cast<double>(T));
    return w;
}

// 1 - weighted normalized Hamming distance, in [0, 1].
inline double reward_frame(const std::vector<FrameClass>& predicted,
                           const std::vector<FrameClass>& truth, double beta) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("frame label length mismatch");
    const std::vector<double> w = frame_weights(beta, predicted.size());
    double total = 0.0, miss = 0.0;
    for (std::size_t t = 0; t < predicted.size(); ++t) {
        total += w[t];
        if (predicted[t] != truth[t]) miss += w[t];
    }
    return 1.0 - miss / total;
}

// argmax over class counts, ties toward the earlier class in (T, N, O)
inline FrameClass dominant_class(const std::vector<FrameClass>& labels) {
    return dominant_label(labels);
}

inline double reward_utterance(FrameClass predicted_dominant, FrameClass utt_label) {
    return predicted_dominant == utt_label ? 1.0 : 0.0;
}

// 1 - WER, clamped into [0, 1] (WER can exceed 1 on insertions).
inline double reward_wer(double wer_value) {
    if (wer_value < 0.0) throw std::invalid_argument("wer must be nonnegative");
    return 1.0 - std::min(wer_value, 1.0);
}

struct RewardBreakdown {
    double r_frame = 0.0, r_utt = 0.0, r_wer = 0.0;
    double composite = 0.0;
    double advantage = 0.0;
};

inline double composite_reward(double r_frame, double r_utt, double r_wer,
                               const GrpoConfig& cfg) {
    return cfg.lambda1 * r_frame + cfg.lambda2 * r_utt + cfg.lambda3 * r_wer;
}

struct GroupStats {
    double mu = 0.0;
    double sigma = 0.0;  // population standard deviation
};

// (r_j - mu)/sigma with population sigma; sigma = 0 yields all zeros.
inline std::vector<double> normalize_advantages(const std::vector<double>& rewards,
                                                GroupStats* stats = nullptr) {
    if (rewards.size() < 2) throw std::invalid_argument("group size must be >= 2");
    const double G = static_cast<double>(rewards.size());
    double mu = 0.0;
    for (double r : rewards) mu += r;
    mu /= G;
    double var = 0.0;
    for (double r : rewards) var += (r - mu) * (r - mu);
    var /= G;
    const double sigma = std::sqrt(var);
    if (stats) {
        stats->mu = mu;
        stats->sigma = sigma;
    }
    std::vector<double> adv(rewards.size(), 0.0);
    if (sigma > 0.0)
        for (std::size_t j = 0; j < rewards.size(); ++j) adv[j] = (rewards[j] - mu) / sigma;
    return adv;
}

// ---------------------------------------------------------------------------
// Diagonal Gaussian enhancement policy
// ---------------------------------------------------------------------------

struct PolicySample {
    Tensor z;             // (T, d) enhanced features
    double log_prob = 0.0;
    std::uint64_t noise_seed = 0;
};

// log N(z | mean, diag(sigma^2)) summed over all entries
inline double gaussian_log_prob(const Tensor& z, const Tensor& mean, const Tensor& log_std) {
    const std::size_t T = mean.dims[0], D = mean.dims[1];
    double lp = 0.0;
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t f = 0; f < D; ++f) {
            const double ls = log_std(f);
            const double s = std::exp(ls);
            const double u = (z(t, f) - mean(t, f)) / s;
            lp += -0.5 * u * u - ls - 0.5 * std::log(2.0 * M_PI);
        }
    return lp;
}

// G samples z_j = mean + sigma o eps_j from a seed-derived stream.
inline std::vector<PolicySample> sample_group(const Tensor& mean, const Tensor& log_std,
                                              std::size_t G, const Rng& base_rng) {
    const std::size_t T = mean.dims[0], D = mean.dims[1];
    if (log_std.size() != D) throw std::invalid_argument("log_std width mismatch");
    for (double ls : log_std.v)
        if (!std::isfinite(ls) || std::exp(ls) <= 0.0)
            throw std::invalid_argument("policy std must be positive and finite");
    std::vector<PolicySample> samples;
    samples.reserve(G);
    for (std::size_t j = 0; j < G; ++j) {
        Rng rng = base_rng.derive(j);
        PolicySample s;
        s.noise_seed = j;
        s.z = Tensor{T, D};
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t f = 0; f < D; ++f)
                s.z(t, f) = mean(t, f) + std::exp(log_std(f)) * rng.normal();
        s.log_prob = gaussian_log_prob(s.z, mean, log_std);
        samples.push_back(std::move(s));
    }
    return samples;
}

// Score-function upstream for the mean path and the log-std parameters:
//   d/dmean  log pi = (z - mean)/sigma^2
//   d/dlogstd log pi = ((z - mean)/sigma)^2 - 1   (summed over frames)
// Accumulates sum_j advantage_j * (d log pi_j); ascent direction.
inline void grpo_score_upstream(const Tensor& mean, const Tensor& log_std,
                                const std::vector<PolicySample>& samples,
                                const std::vector<double>& advantages, Tensor& dmean,
                                Tensor& dlog_std) {
    const std::size_t T = mean.dims[0], D = mean.dims[1];
    if (samples.size() != advantages.size())
        throw std::invalid_argument("sample/advantage count mismatch");
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const double a = advantages[j];
        if (a == 0.0) continue;
        for (std::size_t f = 0; f < D; ++f) {
            const double s = std::exp(log_std(f));
            const double inv_s2 = 1.0 / (s * s);
            double dls = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                const double diff = samples[j].z(t, f) - mean(t, f);
                dmean(t, f) += a * diff * inv_s2;
                dls += a * (diff * diff * inv_s2 - 1.0);
            }
            dlog_std(f) += dls;
        }
    }
}

}  // namespace sidetalk
