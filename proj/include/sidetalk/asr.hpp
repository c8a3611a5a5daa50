// Toy encoder-decoder recognizer.
//
// Encoder: input projection into a latent stream, then two Tri-Mamba blocks
// with residual output projections (frame count preserved). Decoder: a
// single-layer autoregressive GRU with content attention over encoder states;
// attention keys and values carry a few positional features so the decoder
// can advance monotonically through the utterance. Greedy decode is
// deterministic; teacher-forced loss is mean negative log-likelihood.
#pragma once

#include <stdexcept>
#include <vector>

#include "sidetalk/mel.hpp"
#include "sidetalk/tensor.hpp"
#include "sidetalk/tri_mamba.hpp"
#include "sidetalk/vocab.hpp"

namespace sidetalk {

constexpr std::size_t kPosFeatures = 5;

struct ToyAsrModel {
    std::size_t d = 0;        // feature/encoder width
    std::size_t E = 0;        // token embedding width
    std::size_t A = 0;        // attention width
    std::size_t Ds = 0;       // decoder state width
    std::size_t V = kVocabSize;

    Tensor Wenc_in, benc_in;  // (d, d), (d)
    TriMambaBlock blk1, blk2;

    Tensor Emb;               // (V, E)
    Tensor Wq, bq;            // (A, Ds+E)
    Tensor Wk, bk;            // (A, d+P)
    Tensor Wz, bz, Wr, br, Wh, bh;  // (Ds, Ds+E+C) with C = d+P
    Tensor h0;                // (Ds)
    Tensor Wvoc, bvoc;        // (V, Ds)

    Tensor gWenc_in, gbenc_in, gEmb, gWq, gbq, gWk, gbk;
    Tensor gWz, gbz, gWr, gbr, gWh, gbh, gh0, gWvoc, gbvoc;

    std::size_t ctx_width() const { return d + kPosFeatures; }

    void init(Rng& rng, std::size_t width, std::size_t enc_hidden, std::size_t state_n,
              std::size_t ctx_len, std::size_t emb = 24, std::size_t attn = 24,
              std::size_t dec_state = 32) {
        d = width;
        E = emb;
        A = attn;
        Ds = dec_state;
        auto randn = [&](Tensor& t, std::initializer_list<std::size_t> dims, double scale) {
            t = Tensor{dims};
            t.fill_randn(rng, scale);
        };
        randn(Wenc_in, {d, d}, 1.0 / std::sqrt(static_cast<double>(d)));
        benc_in = Tensor{d};
        blk1.init(rng, d, enc_hidden, state_n, ctx_len, d);
        blk2.init(rng, d, enc_hidden, state_n, ctx_len, d);

        const std::size_t C = ctx_width();
        randn(Emb, {V, E}, 0.5);
        randn(Wq, {A, Ds + E}, 1.0 / std::sqrt(static_cast<double>(Ds + E)));
        bq = Tensor{A};
        randn(Wk, {A, d + kPosFeatures}, 1.0 / std::sqrt(static_cast<double>(d + kPosFeatures)));
        bk = Tensor{A};
        const double gs = 1.0 / std::sqrt(static_cast<double>(Ds + E + C));
        randn(Wz, {Ds, Ds + E + C}, gs);
        bz = Tensor{Ds};
        randn(Wr, {Ds, Ds + E + C}, gs);
        br = Tensor{Ds};
        randn(Wh, {Ds, Ds + E + C}, gs);
        bh = Tensor{Ds};
        h0 = Tensor{Ds};
        Wvoc = Tensor{V, Ds};  // zero: uniform output distribution at init
        bvoc = Tensor{V};
    }

    void collect(ParamSet& ps, const std::string& prefix) {
        add_param(ps, prefix + ".Wenc_in", Wenc_in, gWenc_in);
        add_param(ps, prefix + ".benc_in", benc_in, gbenc_in);
        blk1.collect(ps, prefix + ".blk1");
        blk2.collect(ps, prefix + ".blk2");
        add_param(ps, prefix + ".Emb", Emb, gEmb);
        add_param(ps, prefix + ".Wq", Wq, gWq);
        add_param(ps, prefix + ".bq", bq, gbq);
        add_param(ps, prefix + ".Wk", Wk, gWk);
        add_param(ps, prefix + ".bk", bk, gbk);
        add_param(ps, prefix + ".Wz", Wz, gWz);
        add_param(ps, prefix + ".bz", bz, gbz);
        add_param(ps, prefix + ".Wr", Wr, gWr);
        add_param(ps, prefix + ".br", br, gbr);
        add_param(ps, prefix + ".Wh", Wh, gWh);
        add_param(ps, prefix + ".bh", bh, gbh);
        add_param(ps, prefix + ".h0", h0, gh0);
        add_param(ps, prefix + ".Wvoc", Wvoc, gWvoc);
        add_param(ps, prefix + ".bvoc", bvoc, gbvoc);
    }
};

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

struct EncodeCache {
    Tensor feat;            // (T, d) input
    Tensor x0, x1, x2;      // residual stream
    TriMambaCache t1, t2;
    Tensor c1, c2;          // concats
    Tensor p1, p2;          // projections
};

inline Tensor encode(const ToyAsrModel& m, const FeatureSequence& feat, EncodeCache& cache) {
    const std::size_t T = feat.num_frames();
    if (feat.width() != m.d) throw std::invalid_argument("encoder width mismatch");
    cache.feat = feat.values;
    cache.x0 = Tensor{T, m.d};
    for (std::size_t t = 0; t < T; ++t)
        affine(m.Wenc_in, m.benc_in, &feat.values.v[t * m.d], &cache.x0.v[t * m.d]);

    cache.c1 = tri_mamba_forward(m.blk1, cache.x0, cache.t1);
    cache.p1 = tri_mamba_project(m.blk1, cache.c1);
    cache.x1 = cache.x0;
    for (std::size_t i = 0; i < cache.x1.size(); ++i) cache.x1.v[i] += cache.p1.v[i];

    cache.c2 = tri_mamba_forward(m.blk2, cache.x1, cache.t2);
    cache.p2 = tri_mamba_project(m.blk2, cache.c2);
    cache.x2 = cache.x1;
    for (std::size_t i = 0; i < cache.x2.size(); ++i) cache.x2.v[i] += cache.p2.v[i];
    return cache.x2;
}

inline void encode_backward(ToyAsrModel& m, const EncodeCache& cache, const Tensor& denc,
                            Tensor& dfeat) {
    const std::size_t T = cache.feat.dims[0];
    Tensor dx1 = denc;  // residual pass-through
    {
        Tensor dconcat{T, 2 * m.blk2.H};
        tri_mamba_project_backward(m.blk2, cache.c2, denc, dconcat);
        tri_mamba_backward(m.blk2, cache.t2, dconcat, dx1);
    }
    Tensor dx0 = dx1;
    {
        Tensor dconcat{T, 2 * m.blk1.H};
        tri_mamba_project_backward(m.blk1, cache.c1, dx1, dconcat);
        tri_mamba_backward(m.blk1, cache.t1, dconcat, dx0);
    }
    for (std::size_t t = 0; t < T; ++t)
        affine_bwd(m.Wenc_in, &cache.feat.v[t * m.d], &dx0.v[t * m.d], m.gWenc_in, m.gbenc_in,
                   &dfeat.v[t * m.d]);
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

inline void position_features(std::size_t s, std::size_t T, double* out) {
    out[0] = T > 1 ? static_cast<double>(s) / static_cast<double>(T - 1) : 0.0;
    out[1] = std::sin(2.0 * M_PI * s / kWordFrames);
    out[2] = std::cos(2.0 * M_PI * s / kWordFrames);
    out[3] = std::sin(2.0 * M_PI * s / (2 * kWordFrames));
    out[4] = std::cos(2.0 * M_PI * s / (2 * kWordFrames));
}

struct DecoderStepCache {
    int prev = 0;
    std::vector<double> h_prev, e, qin, q, alpha, ctx, xin, z, r, xin_r, hc, h, logits;
};

struct DecoderCache {
    Tensor enc;    // (T, d)
    Tensor keys;   // (T, A)
    Tensor vals;   // (T, d+P)
    std::vector<DecoderStepCache> steps;
};

inline void decoder_prepare(const ToyAsrModel& m, const Tensor& enc, DecoderCache& cache) {
    const std::size_t T = enc.dims[0], C = m.ctx_width();
    cache.enc = enc;
    cache.keys = Tensor{T, m.A};
    cache.vals = Tensor{T, C};
    for (std::size_t s = 0; s < T; ++s) {
        double* val = &cache.vals.v[s * C];
        for (std::size_t j = 0; j < m.d; ++j) val[j] = enc(s, j);
        position_features(s, T, val + m.d);
        affine(m.Wk, m.bk, val, &cache.keys.v[s * m.A]);
    }
    cache.steps.clear();
}

inline void decoder_step(const ToyAsrModel& m, const DecoderCache& cache, int prev_token,
                         const std::vector<double>& h_prev, DecoderStepCache& st) {
    const std::size_t T = cache.enc.dims[0], C = m.ctx_width();
    st.prev = prev_token;
    st.h_prev = h_prev;
    st.e.assign(&m.Emb.v[prev_token * m.E], &m.Emb.v[prev_token * m.E] + m.E);

    st.qin.resize(m.Ds + m.E);
    std::copy(h_prev.begin(), h_prev.end(), st.qin.begin());
    std::copy(st.e.begin(), st.e.end(), st.qin.begin() + m.Ds);
    st.q.resize(m.A);
    affine(m.Wq, m.bq, st.qin.data(), st.q.data());

    st.alpha.resize(T);
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(m.A));
    for (std::size_t s = 0; s < T; ++s)
        st.alpha[s] = dot(st.q.data(), &cache.keys.v[s * m.A], m.A) * inv_sqrt;
    softmax_inplace(st.alpha.data(), T);

    st.ctx.assign(C, 0.0);
    for (std::size_t s = 0; s < T; ++s) {
        const double a = st.alpha[s];
        const double* val = &cache.vals.v[s * C];
        for (std::size_t j = 0; j < C; ++j) st.ctx[j] += a * val[j];
    }

    const std::size_t X = m.Ds + m.E + C;
    st.xin.resize(X);
    std::copy(h_prev.begin(), h_prev.end(), st.xin.begin());
    std::copy(st.e.begin(), st.e.end(), st.xin.begin() + m.Ds);
    std::copy(st.ctx.begin(), st.ctx.end(), st.xin.begin() + m.Ds + m.E);

    st.z.resize(m.Ds);
    st.r.resize(m.Ds);
    affine(m.Wz, m.bz, st.xin.data(), st.z.data());
    affine(m.Wr, m.br, st.xin.data(), st.r.data());
    for (std::size_t i = 0; i < m.Ds; ++i) {
        st.z[i] = sigmoid(st.z[i]);
        st.r[i] = sigmoid(st.r[i]);
    }

    st.xin_r = st.xin;
    for (std::size_t i = 0; i < m.Ds; ++i) st.xin_r[i] = st.r[i] * h_prev[i];
    st.hc.resize(m.Ds);
    affine(m.Wh, m.bh, st.xin_r.data(), st.hc.data());
    for (std::size_t i = 0; i < m.Ds; ++i) st.hc[i] = std::tanh(st.hc[i]);

    st.h.resize(m.Ds);
    for (std::size_t i = 0; i < m.Ds; ++i)
        st.h[i] = (1.0 - st.z[i]) * h_prev[i] + st.z[i] * st.hc[i];

    st.logits.resize(m.V);
    affine(m.Wvoc, m.bvoc, st.h.data(), st.logits.data());
}

// Mean negative log-likelihood of the reference (words then <eos>).
inline double teacher_forced_loss(const ToyAsrModel& m, const Tensor& enc,
                                  const std::vector<int>& ref, DecoderCache& cache) {
    if (ref.empty()) throw std::invalid_argument("reference must be nonempty");
    for (int t : ref)
        if (t < 0 || t >= static_cast<int>(m.V))
            throw std::invalid_argument("reference token outside vocabulary");
    decoder_prepare(m, enc, cache);
    std::vector<double> h(m.h0.v.begin(), m.h0.v.end());
    double loss = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        cache.steps.emplace_back();
        DecoderStepCache& st = cache.steps.back();
        const int prev = i == 0 ? kBosId : ref[i - 1];
        decoder_step(m, cache, prev, h, st);
        std::vector<double> p = st.logits;
        const double lse = softmax_inplace(p.data(), m.V);
        (void)lse;
        loss -= std::log(std::max(p[ref[i]], 1e-300));
        h = st.h;
    }
    return loss / static_cast<double>(ref.size());
}

// Backward for teacher_forced_loss; accumulates model grads and denc.
inline void teacher_forced_backward(ToyAsrModel& m, const DecoderCache& cache,
                                    const std::vector<int>& ref, Tensor& denc) {
    const std::size_t T = cache.enc.dims[0], C = m.ctx_width(), K = ref.size();
    const double invK = 1.0 / static_cast<double>(K);
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(m.A));

    std::vector<double> dh_next(m.Ds, 0.0);
    std::vector<double> dlogits(m.V), dh(m.Ds), dz(m.Ds), dhc(m.Ds), dr(m.Ds);
    std::vector<double> dxin(m.Ds + m.E + C), dxin_r(m.Ds + m.E + C), dpre(m.Ds);
    std::vector<double> dctx(C), de(m.E), dq(m.A), dqin(m.Ds + m.E), dk(m.A);
    std::vector<double> dalpha(T), dscore(T);

    for (std::size_t i = K; i-- > 0;) {
        const DecoderStepCache& st = cache.steps[i];
        // softmax NLL
        std::vector<double> p = st.logits;
        softmax_inplace(p.data(), m.V);
        for (std::size_t v = 0; v < m.V; ++v) dlogits[v] = p[v] * invK;
        dlogits[ref[i]] -= invK;

        // output head
        std::fill(dh.begin(), dh.end(), 0.0);
        affine_bwd(m.Wvoc, st.h.data(), dlogits.data(), m.gWvoc, m.gbvoc, dh.data());
        for (std::size_t j = 0; j < m.Ds; ++j) dh[j] += dh_next[j];

        // GRU combine
        std::vector<double> dh_prev(m.Ds, 0.0);
        for (std::size_t j = 0; j < m.Ds; ++j) {
            dz[j] = dh[j] * (st.hc[j] - st.h_prev[j]);
            dhc[j] = dh[j] * st.z[j];
            dh_prev[j] = dh[j] * (1.0 - st.z[j]);
        }
        // candidate
        std::fill(dxin_r.begin(), dxin_r.end(), 0.0);
        for (std::size_t j = 0; j < m.Ds; ++j) dpre[j] = dhc[j] * (1.0 - st.hc[j] * st.hc[j]);
        affine_bwd(m.Wh, st.xin_r.data(), dpre.data(), m.gWh, m.gbh, dxin_r.data());
        for (std::size_t j = 0; j < m.Ds; ++j) {
            dr[j] = dxin_r[j] * st.h_prev[j];
            dh_prev[j] += dxin_r[j] * st.r[j];
        }
        // gates
        std::fill(dxin.begin(), dxin.end(), 0.0);
        for (std::size_t j = 0; j < m.Ds; ++j) dpre[j] = dz[j] * st.z[j] * (1.0 - st.z[j]);
        affine_bwd(m.Wz, st.xin.data(), dpre.data(), m.gWz, m.gbz, dxin.data());
        for (std::size_t j = 0; j < m.Ds; ++j) dpre[j] = dr[j] * st.r[j] * (1.0 - st.r[j]);
        affine_bwd(m.Wr, st.xin.data(), dpre.data(), m.gWr, m.gbr, dxin.data());

        for (std::size_t j = 0; j < m.Ds; ++j) dh_prev[j] += dxin[j];
        std::fill(de.begin(), de.end(), 0.0);
        for (std::size_t j = 0; j < m.E; ++j) de[j] = dxin[m.Ds + j] + dxin_r[m.Ds + j];
        for (std::size_t j = 0; j < C; ++j)
            dctx[j] = dxin[m.Ds + m.E + j] + dxin_r[m.Ds + m.E + j];

        // attention
        double inner = 0.0;
        for (std::size_t s = 0; s < T; ++s) {
            dalpha[s] = dot(dctx.data(), &cache.vals.v[s * C], C);
            const double a = st.alpha[s];
            double* dv = &denc.v[s * m.d];
            for (std::size_t j = 0; j < m.d; ++j) dv[j] += a * dctx[j];
            inner += dalpha[s] * a;
        }
        std::fill(dq.begin(), dq.end(), 0.0);
        for (std::size_t s = 0; s < T; ++s) {
            dscore[s] = st.alpha[s] * (dalpha[s] - inner);
            const double g = dscore[s] * inv_sqrt;
            const double* key = &cache.keys.v[s * m.A];
            for (std::size_t j = 0; j < m.A; ++j) {
                dq[j] += g * key[j];
                dk[j] = g * st.q[j];
            }
            // key chain: dWk, dbk, and enc part of the value vector
            const double* val = &cache.vals.v[s * C];
            for (std::size_t o = 0; o < m.A; ++o) {
                m.gbk(o) += dk[o];
                double* gw = &m.gWk.v[o * (m.d + kPosFeatures)];
                const double* w = &m.Wk.v[o * (m.d + kPosFeatures)];
                for (std::size_t j = 0; j < m.d + kPosFeatures; ++j) gw[j] += dk[o] * val[j];
                double* dv = &denc.v[s * m.d];
                for (std::size_t j = 0; j < m.d; ++j) dv[j] += dk[o] * w[j];
            }
        }
        std::fill(dqin.begin(), dqin.end(), 0.0);
        affine_bwd(m.Wq, st.qin.data(), dq.data(), m.gWq, m.gbq, dqin.data());
        for (std::size_t j = 0; j < m.Ds; ++j) dh_prev[j] += dqin[j];
        for (std::size_t j = 0; j < m.E; ++j) de[j] += dqin[m.Ds + j];

        // embedding
        for (std::size_t j = 0; j < m.E; ++j) m.gEmb.v[st.prev * m.E + j] += de[j];

        dh_next = dh_prev;
    }
    for (std::size_t j = 0; j < m.Ds; ++j) m.gh0(j) += dh_next[j];
}

// Greedy decode: argmax per step until <eos> or max_len emissions. The
// returned sequence always carries <bos> at the front and <eos> at the end.
inline TokenSequence decode_greedy(const ToyAsrModel& m, const Tensor& enc, int max_len = 12) {
    if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
    DecoderCache cache;
    decoder_prepare(m, enc, cache);
    TokenSequence out;
    out.tokens.push_back(kBosId);
    std::vector<double> h(m.h0.v.begin(), m.h0.v.end());
    int prev = kBosId;
    DecoderStepCache st;
    for (int step = 0; step < max_len; ++step) {
        decoder_step(m, cache, prev, h, st);
        int best = 0;
        for (std::size_t v = 1; v < m.V; ++v)
            if (st.logits[v] > st.logits[best]) best = static_cast<int>(v);
        out.tokens.push_back(best);
        if (best == kEosId) break;
        prev = best;
        h = st.h;
    }
    if (out.tokens.back() != kEosId) out.tokens.push_back(kEosId);
    return out;
}

}  // namespace sidetalk
