// Log-mel feature extraction: Hann-windowed frames on the 10 ms hop grid,
// radix-2 power spectrum, triangular mel filterbank, log with floor.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sidetalk/scene.hpp"
#include "sidetalk/tensor.hpp"

namespace sidetalk {

// Frame-major storage: values(t, f) for frame t, feature f. Matches the label
// grid when frame_hop = kFrameHop.
struct FeatureSequence {
    Tensor values;  // (T x d)
    int frame_hop = kFrameHop;

    std::size_t num_frames() const { return values.dims.empty() ? 0 : values.dims[0]; }
    std::size_t width() const { return values.dims.size() < 2 ? 0 : values.dims[1]; }
};

namespace detail {

// in-place iterative radix-2 FFT on interleaved re/im pairs
inline void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
    const std::size_t n = re.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("FFT size must be a power of 2");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const double wr = std::cos(ang), wi = std::sin(ang);
        for (std::size_t i = 0; i < n; i += len) {
            double cr = 1.0, ci = 0.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::size_t a = i + k, b = i + k + len / 2;
                const double tr = re[b] * cr - im[b] * ci;
                const double ti = re[b] * ci + im[b] * cr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
                const double ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
        }
    }
}

}  // namespace detail

struct MelConfig {
    int fft_size = 512;
    int hop = kFrameHop;
    int win_length = 400;
    int mel_bins = 32;
    double fmin = 80.0;
    double fmax = 7600.0;
    double log_floor = 1e-8;
};

// Triangular filters, rows (mel_bins x fft_size/2+1). Throws if any row sums
// to zero (filter too narrow for the FFT resolution).
inline Tensor mel_filterbank(const MelConfig& cfg, double sample_rate) {
    const int nbins = cfg.fft_size / 2 + 1;
    Tensor fb{static_cast<std::size_t>(cfg.mel_bins), static_cast<std::size_t>(nbins)};
    const double mlo = hz_to_mel(cfg.fmin), mhi = hz_to_mel(cfg.fmax);
    std::vector<double> centers(cfg.mel_bins + 2);
    for (int k = 0; k < cfg.mel_bins + 2; ++k)
        centers[k] = mel_to_hz(mlo + (mhi - mlo) * k / (cfg.mel_bins + 1));
    for (int m = 0; m < cfg.mel_bins; ++m) {
        const double lo = centers[m], mid = centers[m + 1], hi = centers[m + 2];
        double sum = 0.0;
        for (int j = 0; j < nbins; ++j) {
            const double f = j * sample_rate / cfg.fft_size;
            double w = 0.0;
            if (f > lo && f < mid)
                w = (f - lo) / (mid - lo);
            else if (f >= mid && f < hi)
                w = (hi - f) / (hi - mid);
            fb(m, j) = w;
            sum += w;
        }
        if (sum <= 0.0) throw std::invalid_argument("mel filter row sums to zero");
    }
    return fb;
}

// Which mel row contains a given frequency at its peak (nearest center).
inline int mel_bin_of_frequency(const MelConfig& cfg, double freq) {
    const double mlo = hz_to_mel(cfg.fmin), mhi = hz_to_mel(cfg.fmax);
    int best = 0;
    double best_d = 1e300;
    for (int m = 0; m < cfg.mel_bins; ++m) {
        const double c = mel_to_hz(mlo + (mhi - mlo) * (m + 1) / (cfg.mel_bins + 1));
        const double d = std::abs(c - freq);
        if (d < best_d) {
            best_d = d;
            best = m;
        }
    }
    return best;
}

inline FeatureSequence log_mel(const std::vector<double>& wave, const MelConfig& cfg,
                               double sample_rate = 16000.0) {
    if (static_cast<int>(wave.size()) < cfg.fft_size)
        throw std::invalid_argument("waveform shorter than fft_size");
    const Tensor fb = mel_filterbank(cfg, sample_rate);
    const int nbins = cfg.fft_size / 2 + 1;
    const std::size_t frames = (wave.size() + cfg.hop - 1) / cfg.hop;

    std::vector<double> window(cfg.win_length);
    for (int n = 0; n < cfg.win_length; ++n)
        window[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / (cfg.win_length - 1));

    FeatureSequence out;
    out.frame_hop = cfg.hop;
    out.values = Tensor{frames, static_cast<std::size_t>(cfg.mel_bins)};

    std::vector<double> re(cfg.fft_size), im(cfg.fft_size);
    for (std::size_t t = 0; t < frames; ++t) {
        const long start = static_cast<long>(t) * cfg.hop + cfg.hop / 2 - cfg.win_length / 2;
        std::fill(re.begin(), re.end(), 0.0);
        std::fill(im.begin(), im.end(), 0.0);
        for (int n = 0; n < cfg.win_length; ++n) {
            const long s = start + n;
            if (s >= 0 && s < static_cast<long>(wave.size())) re[n] = wave[s] * window[n];
        }
        detail::fft_radix2(re, im);
        for (int m = 0; m < cfg.mel_bins; ++m) {
            double p = 0.0;
            const double* row = &fb.v[m * nbins];
            for (int j = 0; j < nbins; ++j) {
                if (row[j] == 0.0) continue;
                p += row[j] * (re[j] * re[j] + im[j] * im[j]);
            }
            out.values(t, m) = std::log(std::max(p, cfg.log_floor));
        }
    }
    return out;
}

}  // namespace sidetalk
