// Tri-Mamba block: a causal selective scan and an anticausal selective scan
// over the same input, each conditioned on a local context buffer (the mean
// of the previous/next L input frames), with the two hidden sequences
// concatenated. An output projection maps the 2H concat to out_dim.
#pragma once

#include <stdexcept>

#include "sidetalk/ssm.hpp"
#include "sidetalk/tensor.hpp"

namespace sidetalk {

struct TriMambaBlock {
    std::size_t in_dim = 0, H = 0, N = 0, L = 4, out_dim = 0;
    Tensor Win_f, bin_f;  // (H, in_dim), (H)
    Tensor Win_b, bin_b;
    SelScan fwd, bwd;
    Tensor Wout, bout;  // (out_dim, 2H), (out_dim)
    Tensor gWin_f, gbin_f, gWin_b, gbin_b, gWout, gbout;

    void init(Rng& rng, std::size_t in, std::size_t h, std::size_t n, std::size_t l,
              std::size_t out) {
        in_dim = in;
        H = h;
        N = n;
        L = l;
        out_dim = out;
        const double s_in = 1.0 / std::sqrt(static_cast<double>(in));
        Win_f = Tensor{H, in_dim};
        Win_f.fill_randn(rng, s_in);
        bin_f = Tensor{H};
        Win_b = Tensor{H, in_dim};
        Win_b.fill_randn(rng, s_in);
        bin_b = Tensor{H};
        fwd.init(rng, H, N, in_dim);
        bwd.init(rng, H, N, in_dim);
        Wout = Tensor{out_dim, 2 * H};
        Wout.fill_randn(rng, 0.15 / std::sqrt(static_cast<double>(2 * H)));
        bout = Tensor{out_dim};
    }

    // copies forward-direction parameters into the backward direction
    void tie_directions() {
        Win_b = Win_f;
        bin_b = bin_f;
        bwd.A = fwd.A;
        bwd.Wd = fwd.Wd;
        bwd.bd = fwd.bd;
        bwd.WB = fwd.WB;
        bwd.bB = fwd.bB;
        bwd.WC = fwd.WC;
        bwd.bC = fwd.bC;
    }

    void collect(ParamSet& ps, const std::string& prefix) {
        add_param(ps, prefix + ".Win_f", Win_f, gWin_f);
        add_param(ps, prefix + ".bin_f", bin_f, gbin_f);
        add_param(ps, prefix + ".Win_b", Win_b, gWin_b);
        add_param(ps, prefix + ".bin_b", bin_b, gbin_b);
        fwd.collect(ps, prefix + ".fwd");
        bwd.collect(ps, prefix + ".bwd");
        add_param(ps, prefix + ".Wout", Wout, gWout);
        add_param(ps, prefix + ".bout", bout, gbout);
    }
};

struct TriMambaCache {
    Tensor input;         // (T, in_dim)
    Tensor ctxF, ctxBrev;  // (T, in_dim); backward context stored in reversed time
    Tensor uF, uBrev;      // (T, H)
    SelScanCache sf, sb;   // sb runs on reversed time
    Tensor concat;         // (T, 2H)
};

// Rows 1..H are the causal scan, rows H+1..2H the anticausal scan.
inline Tensor tri_mamba_forward(const TriMambaBlock& blk, const Tensor& x, TriMambaCache& cache) {
    const std::size_t T = x.dims[0];
    if (x.dims[1] != blk.in_dim) throw std::invalid_argument("tri-mamba input width mismatch");
    const std::size_t D = blk.in_dim, H = blk.H, L = blk.L;
    cache.input = x;
    cache.ctxF = Tensor{T, D};
    cache.ctxBrev = Tensor{T, D};
    cache.uF = Tensor{T, H};
    cache.uBrev = Tensor{T, H};

    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t lo = t + 1 >= L ? t + 1 - L : 0;
        const double inv = 1.0 / static_cast<double>(t - lo + 1);
        for (std::size_t s = lo; s <= t; ++s)
            for (std::size_t j = 0; j < D; ++j) cache.ctxF(t, j) += x(s, j) * inv;
        const std::size_t hi = std::min(T - 1, t + L - 1);
        const double invb = 1.0 / static_cast<double>(hi - t + 1);
        for (std::size_t s = t; s <= hi; ++s)
            for (std::size_t j = 0; j < D; ++j) cache.ctxBrev(T - 1 - t, j) += x(s, j) * invb;
        affine(blk.Win_f, blk.bin_f, &x.v[t * D], &cache.uF.v[t * H]);
        affine(blk.Win_b, blk.bin_b, &x.v[t * D], &cache.uBrev.v[(T - 1 - t) * H]);
    }

    selscan_forward(blk.fwd, cache.uF, cache.ctxF, cache.sf);
    selscan_forward(blk.bwd, cache.uBrev, cache.ctxBrev, cache.sb);

    cache.concat = Tensor{T, 2 * H};
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t h = 0; h < H; ++h) {
            cache.concat(t, h) = cache.sf.y(t, h);
            cache.concat(t, H + h) = cache.sb.y(T - 1 - t, h);
        }
    return cache.concat;
}

// dx accumulated; parameter grads accumulated into blk.g*.
inline void tri_mamba_backward(TriMambaBlock& blk, const TriMambaCache& cache,
                               const Tensor& dconcat, Tensor& dx) {
    const std::size_t T = cache.input.dims[0], D = blk.in_dim, H = blk.H, L = blk.L;
    Tensor dyF{T, H}, dyBrev{T, H};
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t h = 0; h < H; ++h) {
            dyF(t, h) = dconcat(t, h);
            dyBrev(T - 1 - t, h) = dconcat(t, H + h);
        }

    Tensor duF{T, H}, dctxF{T, D}, duBrev{T, H}, dctxBrev{T, D};
    selscan_backward(blk.fwd, cache.sf, dyF, duF, dctxF);
    selscan_backward(blk.bwd, cache.sb, dyBrev, duBrev, dctxBrev);

    for (std::size_t t = 0; t < T; ++t) {
        affine_bwd(blk.Win_f, &cache.input.v[t * D], &duF.v[t * H], blk.gWin_f, blk.gbin_f,
                   &dx.v[t * D]);
        affine_bwd(blk.Win_b, &cache.input.v[t * D], &duBrev.v[(T - 1 - t) * H], blk.gWin_b,
                   blk.gbin_b, &dx.v[t * D]);
        const std::size_t lo = t + 1 >= L ? t + 1 - L : 0;
        const double inv = 1.0 / static_cast<double>(t - lo + 1);
        for (std::size_t s = lo; s <= t; ++s)
            for (std::size_t j = 0; j < D; ++j) dx(s, j) += dctxF(t, j) * inv;
        const std::size_t hi = std::min(T - 1, t + L - 1);
        const double invb = 1.0 / static_cast<double>(hi - t + 1);
        for (std::size_t s = t; s <= hi; ++s)
            for (std::size_t j = 0; j < D; ++j) dx(s, j) += dctxBrev(T - 1 - t, j) * invb;
    }
}

// out_dim projection of the concat; separate so consumers can add skips.
inline Tensor tri_mamba_project(const TriMambaBlock& blk, const Tensor& concat) {
    const std::size_t T = concat.dims[0];
    Tensor out{T, blk.out_dim};
    for (std::size_t t = 0; t < T; ++t)
        affine(blk.Wout, blk.bout, &concat.v[t * 2 * blk.H], &out.v[t * blk.out_dim]);
    return out;
}

inline void tri_mamba_project_backward(TriMambaBlock& blk, const Tensor& concat,
                                       const Tensor& dout, Tensor& dconcat) {
    const std::size_t T = concat.dims[0];
    for (std::size_t t = 0; t < T; ++t)
        affine_bwd(blk.Wout, &concat.v[t * 2 * blk.H], &dout.v[t * blk.out_dim], blk.gWout,
                   blk.gbout, &dconcat.v[t * 2 * blk.H]);
}

}  // namespace sidetalk
