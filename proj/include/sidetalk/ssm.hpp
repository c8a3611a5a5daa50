// State-space sequence kernels.
//
// Diagonal continuous-time parameterization (A diagonal, B/C vectors)
// discretized by zero-order hold: Abar_i = exp(delta*A_i), Bbar_i =
// (Abar_i - 1)/A_i * B_i with the A_i = 0 limit Bbar_i = delta*B_i. A
// stability guard clamps Abar at 1. The scan is the plain recurrence
//   x_t = Abar o x_{t-1} + Bbar * u_t,   y_t = C . x_t,   x_0 = 0.
//
// The selective variant makes delta (per channel) and B/C (shared across
// channels) affine functions of a per-step conditioning vector, with delta
// passed through softplus. Forward passes fill caches; backward passes
// produce exact reverse-mode gradients for every parameter and the inputs.
#pragma once

#include <cmath>
#include <stdexcept>

#include "sidetalk/tensor.hpp"

namespace sidetalk {

// ZOH discretization of one diagonal mode, with partial derivatives.
struct Zoh {
    double abar = 0.0, phi = 0.0;  // bbar_i = phi * b_i
    double dabar_da = 0.0, dabar_ddelta = 0.0;
    double dphi_da = 0.0, dphi_ddelta = 0.0;
};

inline Zoh discretize_mode(double a, double delta) {
    Zoh z;
    const double za = delta * a;
    const double raw = std::exp(za);
    if (raw > 1.0) {  // stability clamp; gradient is zero past the clamp
        z.abar = 1.0;
    } else {
        z.abar = raw;
        z.dabar_da = delta * raw;
        z.dabar_ddelta = a * raw;
    }
    if (a == 0.0) {
        z.phi = delta;
        z.dphi_da = 0.5 * delta * delta;
        z.dphi_ddelta = 1.0;
    } else {
        z.phi = std::expm1(za) / a;
        z.dphi_da = (delta * raw - z.phi) / a;
        z.dphi_ddelta = raw;
    }
    return z;
}

struct SsmParams {
    Tensor a, b, c;  // (N)
    double delta = 0.1;

    std::size_t state_dim() const { return a.size(); }
};

// (Abar, Bbar) for the diagonal case.
inline std::pair<Tensor, Tensor> discretize_ssm(const SsmParams& p) {
    if (p.delta <= 0.0) throw std::invalid_argument("delta must be positive");
    const std::size_t n = p.state_dim();
    Tensor abar{n}, bbar{n};
    for (std::size_t i = 0; i < n; ++i) {
        const Zoh z = discretize_mode(p.a(i), p.delta);
        abar(i) = z.abar;
        bbar(i) = z.phi * p.b(i);
    }
    return {abar, bbar};
}

struct SsmScanCache {
    Tensor x;  // (T, N) states
    std::vector<double> u;
};

// Recurrence on discrete parameters.
inline std::vector<double> ssm_scan(const Tensor& abar, const Tensor& bbar, const Tensor& c,
                                    const std::vector<double>& u, SsmScanCache* cache = nullptr) {
    const std::size_t n = abar.size(), T = u.size();
    if (bbar.size() != n || c.size() != n) throw std::invalid_argument("ssm parameter size mismatch");
    std::vector<double> state(n, 0.0), y(T, 0.0);
    if (cache) {
        cache->x = Tensor{T, n};
        cache->u = u;
    }
    for (std::size_t t = 0; t < T; ++t) {
        double out = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            state[i] = abar(i) * state[i] + bbar(i) * u[t];
            out += c(i) * state[i];
            if (cache) cache->x(t, i) = state[i];
        }
        y[t] = out;
    }
    return y;
}

inline std::vector<double> ssm_scan(const SsmParams& p, const std::vector<double>& u,
                                    SsmScanCache* cache = nullptr) {
    auto [abar, bbar] = discretize_ssm(p);
    return ssm_scan(abar, bbar, p.c, u, cache);
}

struct SsmGrads {
    Tensor dabar, dbbar, dc;  // (N)
    std::vector<double> du;
};

inline SsmGrads ssm_scan_backward(const Tensor& abar, const Tensor& bbar, const Tensor& c,
                                  const SsmScanCache& cache, const std::vector<double>& dy) {
    const std::size_t n = abar.size(), T = cache.u.size();
    if (dy.size() != T) throw std::invalid_argument("upstream length mismatch");
    SsmGrads g;
    g.dabar = Tensor{n};
    g.dbbar = Tensor{n};
    g.dc = Tensor{n};
    g.du.assign(T, 0.0);

    std::vector<double> lambda(n, 0.0);  // adjoint of x_t
    for (std::size_t t = T; t-- > 0;) {
        double du_t = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lambda[i] += dy[t] * c(i);
            g.dc(i) += dy[t] * cache.x(t, i);
            const double x_prev = t > 0 ? cache.x(t - 1, i) : 0.0;
            g.dabar(i) += lambda[i] * x_prev;
            g.dbbar(i) += lambda[i] * cache.u[t];
            du_t += lambda[i] * bbar(i);
            lambda[i] *= abar(i);
        }
        g.du[t] = du_t;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Selective scan: H independent channels with per-step parameters derived
// from a conditioning sequence ctx (T x Dc):
//   delta_t[h] = softplus(Wd[h].ctx_t + bd[h])
//   B_t = WB.ctx_t + bB,  C_t = WC.ctx_t + bC   (shared across channels)
// then per channel the ZOH recurrence with input u_t[h].
// ---------------------------------------------------------------------------

struct SelScan {
    std::size_t H = 0, N = 0, Dc = 0;
    Tensor A;        // (H, N)
    Tensor Wd, bd;   // (H, Dc), (H)
    Tensor WB, bB;   // (N, Dc), (N)
    Tensor WC, bC;   // (N, Dc), (N)
    Tensor gA, gWd, gbd, gWB, gbB, gWC, gbC;

    void init(Rng& rng, std::size_t h, std::size_t n, std::size_t dc) {
        H = h;
        N = n;
        Dc = dc;
        A = Tensor{H, N};
        for (std::size_t i = 0; i < H; ++i)
            for (std::size_t j = 0; j < N; ++j) A(i, j) = -0.5 * static_cast<double>(j + 1);
        Wd = Tensor{H, Dc};
        Wd.fill_randn(rng, 0.2 / std::sqrt(static_cast<double>(Dc)));
        bd = Tensor{H};
        bd.fill(-1.0);  // softplus(-1) ~ 0.31
        WB = Tensor{N, Dc};
        WB.fill_randn(rng, 0.4 / std::sqrt(static_cast<double>(Dc)));
        bB = Tensor{N};
        bB.fill(0.25);
        WC = Tensor{N, Dc};
        WC.fill_randn(rng, 0.4 / std::sqrt(static_cast<double>(Dc)));
        bC = Tensor{N};
        bC.fill(0.25);
    }

    void collect(ParamSet& ps, const std::string& prefix) {
        add_param(ps, prefix + ".A", A, gA);
        add_param(ps, prefix + ".Wd", Wd, gWd);
        add_param(ps, prefix + ".bd", bd, gbd);
        add_param(ps, prefix + ".WB", WB, gWB);
        add_param(ps, prefix + ".bB", bB, gbB);
        add_param(ps, prefix + ".WC", WC, gWC);
        add_param(ps, prefix + ".bC", bC, gbC);
    }
};

struct SelScanCache {
    Tensor u, ctx;          // (T,H), (T,Dc)
    Tensor x;               // (T,H,N)
    Tensor dlt_pre, dlt;    // (T,H)
    Tensor Bt, Ct;          // (T,N)
    Tensor y;               // (T,H)
};

inline void selscan_forward(const SelScan& p, const Tensor& u, const Tensor& ctx,
                            SelScanCache& cache) {
    const std::size_t T = u.dims[0];
    if (u.dims[1] != p.H || ctx.dims[0] != T || ctx.dims[1] != p.Dc)
        throw std::invalid_argument("selective scan shape mismatch");
    cache.u = u;
    cache.ctx = ctx;
    cache.x = Tensor{T, p.H, p.N};
    cache.dlt_pre = Tensor{T, p.H};
    cache.dlt = Tensor{T, p.H};
    cache.Bt = Tensor{T, p.N};
    cache.Ct = Tensor{T, p.N};
    cache.y = Tensor{T, p.H};

    std::vector<double> state(p.H * p.N, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const double* cx = &ctx.v[t * p.Dc];
        for (std::size_t i = 0; i < p.N; ++i) {
            cache.Bt(t, i) = dot(&p.WB.v[i * p.Dc], cx, p.Dc) + p.bB(i);
            cache.Ct(t, i) = dot(&p.WC.v[i * p.Dc], cx, p.Dc) + p.bC(i);
        }
        for (std::size_t h = 0; h < p.H; ++h) {
            const double pre = dot(&p.Wd.v[h * p.Dc], cx, p.Dc) + p.bd(h);
            const double dlt = softplus(pre);
            cache.dlt_pre(t, h) = pre;
            cache.dlt(t, h) = dlt;
            const double uth = u(t, h);
            double out = 0.0;
            double* st = &state[h * p.N];
            for (std::size_t i = 0; i < p.N; ++i) {
                const Zoh z = discretize_mode(p.A(h, i), dlt);
                st[i] = z.abar * st[i] + z.phi * cache.Bt(t, i) * uth;
                cache.x(t, h, i) = st[i];
                out += cache.Ct(t, i) * st[i];
            }
            cache.y(t, h) = out;
        }
    }
}

// Accumulates parameter grads into p.g*, input grads into du/dctx (caller
// zeroes or accumulates as needed).
inline void selscan_backward(SelScan& p, const SelScanCache& cache, const Tensor& dy, Tensor& du,
                             Tensor& dctx) {
    const std::size_t T = cache.u.dims[0];
    std::vector<double> lambda(p.H * p.N, 0.0);
    std::vector<double> dBt(p.N), dCt(p.N), ddlt(p.H);
    for (std::size_t t = T; t-- > 0;) {
        std::fill(dBt.begin(), dBt.end(), 0.0);
        std::fill(dCt.begin(), dCt.end(), 0.0);
        const double* cx = &cache.ctx.v[t * p.Dc];
        for (std::size_t h = 0; h < p.H; ++h) {
            const double dlt = cache.dlt(t, h);
            const double uth = cache.u(t, h);
            const double dyth = dy(t, h);
            double du_th = 0.0, ddlt_h = 0.0;
            double* lam = &lambda[h * p.N];
            for (std::size_t i = 0; i < p.N; ++i) {
                const Zoh z = discretize_mode(p.A(h, i), dlt);
                lam[i] += dyth * cache.Ct(t, i);
                dCt[i] += dyth * cache.x(t, h, i);
                const double x_prev = t > 0 ? cache.x(t - 1, h, i) : 0.0;
                const double dabar = lam[i] * x_prev;
                const double dbbar = lam[i] * uth;  // bbar = phi * Bt
                du_th += lam[i] * z.phi * cache.Bt(t, i);
                dBt[i] += dbbar * z.phi;
                const double dphi = dbbar * cache.Bt(t, i);
                ddlt_h += dabar * z.dabar_ddelta + dphi * z.dphi_ddelta;
                p.gA(h, i) += dabar * z.dabar_da + dphi * z.dphi_da;
                lam[i] *= z.abar;
            }
            du(t, h) += du_th;
            ddlt[h] = ddlt_h;
        }
        // chain delta through softplus and the projections
        double* dcx = &dctx.v[t * p.Dc];
        for (std::size_t h = 0; h < p.H; ++h) {
            const double dpre = ddlt[h] * sigmoid(cache.dlt_pre(t, h));
            p.gbd(h) += dpre;
            double* gw = &p.gWd.v[h * p.Dc];
            const double* w = &p.Wd.v[h * p.Dc];
            for (std::size_t j = 0; j < p.Dc; ++j) {
                gw[j] += dpre * cx[j];
                dcx[j] += dpre * w[j];
            }
        }
        for (std::size_t i = 0; i < p.N; ++i) {
            p.gbB(i) += dBt[i];
            p.gbC(i) += dCt[i];
            double* gwb = &p.gWB.v[i * p.Dc];
            double* gwc = &p.gWC.v[i * p.Dc];
            const double* wb = &p.WB.v[i * p.Dc];
            const double* wc = &p.WC.v[i * p.Dc];
            for (std::size_t j = 0; j < p.Dc; ++j) {
                gwb[j] += dBt[i] * cx[j];
                gwc[j] += dCt[i] * cx[j];
                dcx[j] += dBt[i] * wb[j] + dCt[i] * wc[j];
            }
        }
    }
}

// Spec-level selective scan over a scalar stream: the input frame itself is
// the conditioning vector (Dc = 1, H = 1).
inline std::vector<double> selective_scan(SelScan& p, const std::vector<double>& input,
                                          SelScanCache* cache = nullptr) {
    if (p.H != 1 || p.Dc != 1) throw std::invalid_argument("scalar selective scan needs H=Dc=1");
    const std::size_t T = input.size();
    Tensor u{T, 1}, ctx{T, 1};
    for (std::size_t t = 0; t < T; ++t) u(t, 0) = ctx(t, 0) = input[t];
    SelScanCache local;
    SelScanCache& c = cache ? *cache : local;
    selscan_forward(p, u, ctx, c);
    std::vector<double> y(T);
    for (std::size_t t = 0; t < T; ++t) y[t] = c.y(t, 0);
    return y;
}

}  // namespace sidetalk
