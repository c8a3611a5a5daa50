// Mix Block: raw multi-channel waveform fusion.
//
// 1-D convolution (m channels -> H features, 25 ms kernel, 10 ms stride)
// -> ReLU -> per-feature normalization (running statistics, frozen during
// gradient evaluation) -> Tri-Mamba -> output projection, with an
// element-wise skip connection from the normalized frontend to the output.
// Output frames align one-to-one with the label grid: T = ceil(samples/hop).
#pragma once

#include <stdexcept>

#include "sidetalk/mel.hpp"
#include "sidetalk/scene.hpp"
#include "sidetalk/tensor.hpp"
#include "sidetalk/tri_mamba.hpp"

namespace sidetalk {

struct FeatNorm {
    Tensor gamma, beta;          // (H)
    Tensor run_mean, run_var;    // (H)
    Tensor ggamma, gbeta;
    double eps = 1e-5;
    double momentum = 0.99;

    void init(std::size_t h) {
        gamma = Tensor{h};
        gamma.fill(1.0);
        beta = Tensor{h};
        run_mean = Tensor{h};
        run_var = Tensor{h};
        run_var.fill(1.0);
    }

    void collect(ParamSet& ps, const std::string& prefix) {
        add_param(ps, prefix + ".gamma", gamma, ggamma);
        add_param(ps, prefix + ".beta", beta, gbeta);
        add_state(ps, prefix + ".run_mean", run_mean);
        add_state(ps, prefix + ".run_var", run_var);
    }

    // y = gamma * (x - mean)/sqrt(var+eps) + beta, statistics held constant
    void forward(const Tensor& x, Tensor& y) const {
        const std::size_t T = x.dims[0], H = x.dims[1];
        y = Tensor{T, H};
        for (std::size_t h = 0; h < H; ++h) {
            const double scale = gamma(h) / std::sqrt(run_var(h) + eps);
            const double shift = beta(h) - run_mean(h) * scale;
            for (std::size_t t = 0; t < T; ++t) y(t, h) = x(t, h) * scale + shift;
        }
    }

    void backward(const Tensor& x, const Tensor& dy, Tensor& dx) {
        const std::size_t T = x.dims[0], H = x.dims[1];
        for (std::size_t h = 0; h < H; ++h) {
            const double inv_std = 1.0 / std::sqrt(run_var(h) + eps);
            for (std::size_t t = 0; t < T; ++t) {
                const double xhat = (x(t, h) - run_mean(h)) * inv_std;
                ggamma(h) += dy(t, h) * xhat;
                gbeta(h) += dy(t, h);
                dx(t, h) += dy(t, h) * gamma(h) * inv_std;
            }
        }
    }

    // EMA update from a batch of frames (training only)
    void update_stats(const Tensor& x) {
        const std::size_t T = x.dims[0], H = x.dims[1];
        if (T == 0) return;
        for (std::size_t h = 0; h < H; ++h) {
            double s = 0.0, s2 = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                s += x(t, h);
                s2 += x(t, h) * x(t, h);
            }
            const double mean = s / static_cast<double>(T);
            const double var = std::max(0.0, s2 / static_cast<double>(T) - mean * mean);
            run_mean(h) = momentum * run_mean(h) + (1.0 - momentum) * mean;
            run_var(h) = momentum * run_var(h) + (1.0 - momentum) * var;
        }
    }
};

struct MixBlock {
    std::size_t channels = 0, H = 0, kernel = 400, stride = kFrameHop;
    Tensor Wc;  // (H, channels, kernel)
    Tensor bc;  // (H)
    FeatNorm norm;
    TriMambaBlock tri;  // in H, out H
    Tensor skip_gain;   // (H), init 1
    Tensor gWc, gbc, gskip_gain;

    void init(Rng& rng, std::size_t m, std::size_t h, std::size_t n, std::size_t l,
              std::size_t k = 400, std::size_t s = kFrameHop) {
        channels = m;
        H = h;
        kernel = k;
        stride = s;
        Wc = Tensor{H, channels, kernel};
        Wc.fill_randn(rng, 1.0 / std::sqrt(static_cast<double>(channels * kernel)));
        bc = Tensor{H};
        norm.init(H);
        tri.init(rng, H, H, n, l, H);
        skip_gain = Tensor{H};
        skip_gain.fill(1.0);
    }

    void collect(ParamSet& ps, const std::string& prefix) {
        add_param(ps, prefix + ".Wc", Wc, gWc);
        add_param(ps, prefix + ".bc", bc, gbc);
        norm.collect(ps, prefix + ".norm");
        tri.collect(ps, prefix + ".tri");
        add_param(ps, prefix + ".skip_gain", skip_gain, gskip_gain);
    }

    long pad_left() const { return static_cast<long>(kernel - stride) / 2; }
    std::size_t frames_for(std::size_t samples) const { return (samples + stride - 1) / stride; }
};

struct MixBlockCache {
    Tensor conv_pre;   // (T, H) pre-ReLU
    Tensor relu_out;   // (T, H)
    Tensor frontend;   // (T, H) post-norm
    TriMambaCache tri_cache;
    Tensor concat;     // (T, 2H)
    Tensor proj;       // (T, H)
};

inline FeatureSequence mix_block_forward(const MixBlock& mb, const MultiChannelWaveform& wave,
                                         MixBlockCache& cache) {
    if (wave.num_channels() != mb.channels)
        throw std::invalid_argument("mix block channel count mismatch");
    const std::size_t S = wave.num_samples();
    const std::size_t T = mb.frames_for(S);
    const long pad = mb.pad_left();

    cache.conv_pre = Tensor{T, mb.H};
    cache.relu_out = Tensor{T, mb.H};
    for (std::size_t t = 0; t < T; ++t) {
        const long start = static_cast<long>(t * mb.stride) - pad;
        const long lo = std::max(0L, -start);
        const long hi = std::min<long>(mb.kernel, static_cast<long>(S) - start);
        for (std::size_t h = 0; h < mb.H; ++h) {
            double acc = mb.bc(h);
            for (std::size_t c = 0; c < mb.channels; ++c) {
                const double* w = &mb.Wc.v[(h * mb.channels + c) * mb.kernel];
                const double* x = wave.channels[c].data() + start;
                for (long k = lo; k < hi; ++k) acc += w[k] * x[k];
            }
            cache.conv_pre(t, h) = acc;
            cache.relu_out(t, h) = acc > 0.0 ? acc : 0.0;
        }
    }

    mb.norm.forward(cache.relu_out, cache.frontend);
    cache.concat = tri_mamba_forward(mb.tri, cache.frontend, cache.tri_cache);
    cache.proj = tri_mamba_project(mb.tri, cache.concat);

    FeatureSequence out;
    out.frame_hop = static_cast<int>(mb.stride);
    out.values = Tensor{T, mb.H};
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t h = 0; h < mb.H; ++h)
            out.values(t, h) = mb.skip_gain(h) * cache.frontend(t, h) + cache.proj(t, h);
    return out;
}

// Parameter grads accumulated into mb.g*; waveform grads are not needed
// (the conv is the first layer of the stack).
inline void mix_block_backward(MixBlock& mb, const MultiChannelWaveform& wave,
                               const MixBlockCache& cache, const Tensor& dout) {
    const std::size_t T = cache.frontend.dims[0];
    const std::size_t S = wave.num_samples();
    Tensor dfront{T, mb.H};
    Tensor dproj{T, mb.H};
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t h = 0; h < mb.H; ++h) {
            mb.gskip_gain(h) += dout(t, h) * cache.frontend(t, h);
            dfront(t, h) = dout(t, h) * mb.skip_gain(h);
            dproj(t, h) = dout(t, h);
        }

    Tensor dconcat{T, 2 * mb.H};
    tri_mamba_project_backward(mb.tri, cache.concat, dproj, dconcat);
    tri_mamba_backward(mb.tri, cache.tri_cache, dconcat, dfront);

    Tensor drelu{T, mb.H};
    mb.norm.backward(cache.relu_out, dfront, drelu);

    const long pad = mb.pad_left();
    for (std::size_t t = 0; t < T; ++t) {
        const long start = static_cast<long>(t * mb.stride) - pad;
        const long lo = std::max(0L, -start);
        const long hi = std::min<long>(mb.kernel, static_cast<long>(S) - start);
        for (std::size_t h = 0; h < mb.H; ++h) {
            if (cache.conv_pre(t, h) <= 0.0) continue;
            const double g = drelu(t, h);
            if (g == 0.0) continue;
            mb.gbc(h) += g;
            for (std::size_t c = 0; c < mb.channels; ++c) {
                double* gw = &mb.gWc.v[(h * mb.channels + c) * mb.kernel];
                const double* x = wave.channels[c].data() + start;
                for (long k = lo; k < hi; ++k) gw[k] += g * x[k];
            }
        }
    }
}

}  // namespace sidetalk
