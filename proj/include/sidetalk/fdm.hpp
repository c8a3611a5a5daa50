// Frame Diarization Mamba adapter.
//
// A small causal selective-scan head predicts per-frame posteriors over the
// three speaker conditions (target-only, non-target-only, overlap), and the
// adapter blends class-specific affine transformations of the feature stream
// by those posteriors:  y~_t = f_T(y_t) p_T + f_N(y_t) p_N + f_O(y_t) p_O.
#pragma once

#include <stdexcept>

#include "sidetalk/mel.hpp"
#include "sidetalk/scene.hpp"
#include "sidetalk/ssm.hpp"
#include "sidetalk/tensor.hpp"

namespace sidetalk {

// Frame-major posteriors, columns ordered (T, N, O); each row sums to 1.
struct ClassPosteriors {
    Tensor p;  // (T, 3)
    std::size_t num_frames() const { return p.dims.empty() ? 0 : p.dims[0]; }
};

struct Fdm {
    std::size_t d = 0;   // feature width
    std::size_t Hc = 0, Nc = 0, L = 4;
    // class-specific affine maps, initialized to the identity
    Tensor Wt, bt, Wn, bn, Wo, bo;  // (d,d), (d)
    // classifier head
    Tensor Wcin, bcin;   // (Hc, d)
    SelScan scan;        // causal, Dc = d
    Tensor Wdirect;      // (3, d) instantaneous path
    Tensor Wcls, bcls;   // (3, Hc), (3)
    // grads
    Tensor gWt, gbt, gWn, gbn, gWo, gbo;
    Tensor gWcin, gbcin, gWdirect, gWcls, gbcls;

    void init(Rng& rng, std::size_t width, std::size_t hc = 12, std::size_t nc = 4,
              std::size_t l = 4) {
        d = width;
        Hc = hc;
        Nc = nc;
        L = l;
        auto identity = [&](Tensor& W, Tensor& b) {
            W = Tensor{d, d};
            for (std::size_t i = 0; i < d; ++i) W(i, i) = 1.0;
            b = Tensor{d};
        };
        identity(Wt, bt);
        identity(Wn, bn);
        identity(Wo, bo);
        Wcin = Tensor{Hc, d};
        Wcin.fill_randn(rng, 1.0 / std::sqrt(static_cast<double>(d)));
        bcin = Tensor{Hc};
        scan.init(rng, Hc, Nc, d);
        Wdirect = Tensor{3, d};
        Wdirect.fill_randn(rng, 0.01);
        Wcls = Tensor{3, Hc};
        Wcls.fill_randn(rng, 0.01);
        bcls = Tensor{3};
    }

    void collect(ParamSet& ps, const std::string& prefix) {
        add_param(ps, prefix + ".Wt", Wt, gWt);
        add_param(ps, prefix + ".bt", bt, gbt);
        add_param(ps, prefix + ".Wn", Wn, gWn);
        add_param(ps, prefix + ".bn", bn, gbn);
        add_param(ps, prefix + ".Wo", Wo, gWo);
        add_param(ps, prefix + ".bo", bo, gbo);
        add_param(ps, prefix + ".Wcin", Wcin, gWcin);
        add_param(ps, prefix + ".bcin", bcin, gbcin);
        scan.collect(ps, prefix + ".scan");
        add_param(ps, prefix + ".Wdirect", Wdirect, gWdirect);
        add_param(ps, prefix + ".Wcls", Wcls, gWcls);
        add_param(ps, prefix + ".bcls", bcls, gbcls);
    }
};

struct FdmClassifierCache {
    Tensor feat;    // (T, d)
    Tensor ctx;     // (T, d) causal window means
    Tensor u;       // (T, Hc)
    SelScanCache sc;
    Tensor logits;  // (T, 3)
    Tensor post;    // (T, 3)
};

// Causal: frame t depends on frames <= t only.
inline ClassPosteriors class_posteriors(const Fdm& fdm, const FeatureSequence& feat,
                                        FdmClassifierCache& cache) {
    const std::size_t T = feat.num_frames(), D = feat.width();
    if (D != fdm.d) throw std::invalid_argument("classifier width mismatch");
    cache.feat = feat.values;
    cache.ctx = Tensor{T, D};
    cache.u = Tensor{T, fdm.Hc};
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t lo = t + 1 >= fdm.L ? t + 1 - fdm.L : 0;
        const double inv = 1.0 / static_cast<double>(t - lo + 1);
        for (std::size_t s = lo; s <= t; ++s)
            for (std::size_t j = 0; j < D; ++j) cache.ctx(t, j) += feat.values(s, j) * inv;
        affine(fdm.Wcin, fdm.bcin, &feat.values.v[t * D], &cache.u.v[t * fdm.Hc]);
    }
    selscan_forward(fdm.scan, cache.u, cache.ctx, cache.sc);

    cache.logits = Tensor{T, 3};
    cache.post = Tensor{T, 3};
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < 3; ++k)
            cache.logits(t, k) = dot(&fdm.Wcls.v[k * fdm.Hc], &cache.sc.y.v[t * fdm.Hc], fdm.Hc) +
                                 dot(&fdm.Wdirect.v[k * D], &feat.values.v[t * D], D) +
                                 fdm.bcls(k);
        double row[3] = {cache.logits(t, 0), cache.logits(t, 1), cache.logits(t, 2)};
        softmax_inplace(row, 3);
        for (std::size_t k = 0; k < 3; ++k) cache.post(t, k) = row[k];
    }
    ClassPosteriors out;
    out.p = cache.post;
    return out;
}

// dfeat accumulated; parameter grads accumulated into fdm.g*.
inline void class_posteriors_backward(Fdm& fdm, const FdmClassifierCache& cache,
                                      const Tensor& dpost, Tensor& dfeat) {
    const std::size_t T = cache.feat.dims[0], D = fdm.d;
    Tensor dlogits{T, 3};
    for (std::size_t t = 0; t < T; ++t) {
        double inner = 0.0;
        for (std::size_t k = 0; k < 3; ++k) inner += dpost(t, k) * cache.post(t, k);
        for (std::size_t k = 0; k < 3; ++k)
            dlogits(t, k) = cache.post(t, k) * (dpost(t, k) - inner);
    }

    Tensor dscan_y{T, fdm.Hc};
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < 3; ++k) {
            const double g = dlogits(t, k);
            fdm.gbcls(k) += g;
            for (std::size_t h = 0; h < fdm.Hc; ++h) {
                fdm.gWcls.v[k * fdm.Hc + h] += g * cache.sc.y(t, h);
                dscan_y(t, h) += g * fdm.Wcls.v[k * fdm.Hc + h];
            }
            for (std::size_t j = 0; j < D; ++j) {
                fdm.gWdirect.v[k * D + j] += g * cache.feat(t, j);
                dfeat(t, j) += g * fdm.Wdirect.v[k * D + j];
            }
        }
    }

    Tensor du{T, fdm.Hc}, dctx{T, D};
    selscan_backward(fdm.scan, cache.sc, dscan_y, du, dctx);
    for (std::size_t t = 0; t < T; ++t) {
        affine_bwd(fdm.Wcin, &cache.feat.v[t * D], &du.v[t * fdm.Hc], fdm.gWcin, fdm.gbcin,
                   &dfeat.v[t * D]);
        const std::size_t lo = t + 1 >= fdm.L ? t + 1 - fdm.L : 0;
        const double inv = 1.0 / static_cast<double>(t - lo + 1);
        for (std::size_t s = lo; s <= t; ++s)
            for (std::size_t j = 0; j < D; ++j) dfeat(s, j) += dctx(t, j) * inv;
    }
}

struct FdmApplyCache {
    Tensor fT, fN, fO;  // (T, d) class-transformed features
};

inline FeatureSequence fdm_apply(const Fdm& fdm, const FeatureSequence& feat,
                                 const ClassPosteriors& post, FdmApplyCache& cache) {
    const std::size_t T = feat.num_frames(), D = feat.width();
    if (D != fdm.d) throw std::invalid_argument("fdm width mismatch");
    if (post.num_frames() != T)
        throw std::invalid_argument("posterior/feature frame count mismatch");
    cache.fT = Tensor{T, D};
    cache.fN = Tensor{T, D};
    cache.fO = Tensor{T, D};
    FeatureSequence out;
    out.frame_hop = feat.frame_hop;
    out.values = Tensor{T, D};
    for (std::size_t t = 0; t < T; ++t) {
        const double* x = &feat.values.v[t * D];
        affine(fdm.Wt, fdm.bt, x, &cache.fT.v[t * D]);
        affine(fdm.Wn, fdm.bn, x, &cache.fN.v[t * D]);
        affine(fdm.Wo, fdm.bo, x, &cache.fO.v[t * D]);
        const double pT = post.p(t, 0), pN = post.p(t, 1), pO = post.p(t, 2);
        for (std::size_t j = 0; j < D; ++j)
            out.values(t, j) = pT * cache.fT(t, j) + pN * cache.fN(t, j) + pO * cache.fO(t, j);
    }
    return out;
}

inline void fdm_apply_backward(Fdm& fdm, const FeatureSequence& feat, const ClassPosteriors& post,
                               const FdmApplyCache& cache, const Tensor& dout, Tensor& dfeat,
                               Tensor& dpost) {
    const std::size_t T = feat.num_frames(), D = fdm.d;
    std::vector<double> dfT(D), dfN(D), dfO(D);
    for (std::size_t t = 0; t < T; ++t) {
        const double pT = post.p(t, 0), pN = post.p(t, 1), pO = post.p(t, 2);
        const double* g = &dout.v[t * D];
        for (std::size_t j = 0; j < D; ++j) {
            dpost(t, 0) += g[j] * cache.fT(t, j);
            dpost(t, 1) += g[j] * cache.fN(t, j);
            dpost(t, 2) += g[j] * cache.fO(t, j);
            dfT[j] = g[j] * pT;
            dfN[j] = g[j] * pN;
            dfO[j] = g[j] * pO;
        }
        const double* x = &feat.values.v[t * D];
        affine_bwd(fdm.Wt, x, dfT.data(), fdm.gWt, fdm.gbt, &dfeat.v[t * D]);
        affine_bwd(fdm.Wn, x, dfN.data(), fdm.gWn, fdm.gbn, &dfeat.v[t * D]);
        affine_bwd(fdm.Wo, x, dfO.data(), fdm.gWo, fdm.gbo, &dfeat.v[t * D]);
    }
}

// Per-frame argmax, ties broken toward the earlier class in (T, N, O).
inline FrameLabelSequence predict_frame_classes(const ClassPosteriors& post,
                                                int hop = kFrameHop) {
    FrameLabelSequence seq;
    seq.hop_samples = hop;
    const std::size_t T = post.num_frames();
    seq.labels.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (post.p(t, k) > post.p(t, best)) best = k;
        seq.labels.push_back(static_cast<FrameClass>(best));
    }
    return seq;
}

}  // namespace sidetalk
