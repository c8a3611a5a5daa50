// Dense double tensors, parameter registry, and a portable seeded RNG.
// Everything downstream works in double precision on flat row-major storage.
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sidetalk {

// ---------------------------------------------------------------------------
// RNG
//
// mt19937_64 supplies the bit stream; uniform/normal mappings are hand-rolled
// so results do not depend on the standard library's distribution
// implementations. derive() hashes (seed, stream) so independent substreams
// (per scene, per group member) never share state.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0)
        : eng_(splitmix64(seed ^ 0x6a09e667f3bcc908ULL)), stream_key_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        // rejection sampling keeps the map exact for any n
        const std::uint64_t limit = ~0ULL - ~0ULL % n;
        std::uint64_t v;
        do { v = eng_(); } while (v >= limit);
        return v % n;
    }

    // standard normal via Box-Muller, one spare cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // independent substream keyed by id; derivations nest safely
    Rng derive(std::uint64_t id) const {
        return Rng(splitmix64(stream_key_ ^ splitmix64(id + 0x51ed2701a3c5e1b7ULL)));
    }

private:
    std::mt19937_64 eng_;
    std::uint64_t stream_key_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// Tensor
// ---------------------------------------------------------------------------

struct Tensor {
    std::vector<std::size_t> dims;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(std::initializer_list<std::size_t> d) : dims(d) {
        v.assign(count(dims), 0.0);
    }
    explicit Tensor(const std::vector<std::size_t>& d) : dims(d) {
        v.assign(count(dims), 0.0);
    }

    static std::size_t count(const std::vector<std::size_t>& d) {
        std::size_t n = 1;
        for (std::size_t x : d) n *= x;
        return n;
    }

    std::size_t size() const { return v.size(); }
    std::size_t dim(std::size_t i) const { return dims.at(i); }

    double& operator()(std::size_t i) { return v[i]; }
    double operator()(std::size_t i) const { return v[i]; }
    double& operator()(std::size_t i, std::size_t j) { return v[i * dims[1] + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v[i * dims[1] + j]; }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return v[(i * dims[1] + j) * dims[2] + k];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return v[(i * dims[1] + j) * dims[2] + k];
    }

    void zero() { std::fill(v.begin(), v.end(), 0.0); }
    void fill(double x) { std::fill(v.begin(), v.end(), x); }

    void fill_randn(Rng& rng, double scale) {
        for (double& x : v) x = scale * rng.normal();
    }

    bool same_shape(const Tensor& o) const { return dims == o.dims; }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// Parameter registry: models expose (name, value, grad, trainable) tuples so
// the optimizer, checkpointing, and gradient checks can walk every tensor.
// ---------------------------------------------------------------------------

struct ParamRef {
    std::string name;
    Tensor* value = nullptr;
    Tensor* grad = nullptr;   // null for non-trainable state (running stats)
    bool trainable = true;
};

using ParamSet = std::vector<ParamRef>;

inline void add_param(ParamSet& ps, const std::string& name, Tensor& value, Tensor& grad,
                      bool trainable = true) {
    grad.dims = value.dims;
    grad.v.assign(value.size(), 0.0);
    ps.push_back(ParamRef{name, &value, &grad, trainable});
}

inline void add_state(ParamSet& ps, const std::string& name, Tensor& value) {
    ps.push_back(ParamRef{name, &value, nullptr, false});
}

inline void zero_grads(ParamSet& ps) {
    for (auto& p : ps)
        if (p.grad) p.grad->zero();
}

inline std::size_t param_count(const ParamSet& ps, bool trainable_only = true) {
    std::size_t n = 0;
    for (const auto& p : ps)
        if (!trainable_only || p.trainable) n += p.value->size();
    return n;
}

// ---------------------------------------------------------------------------
// Small math helpers
// ---------------------------------------------------------------------------

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

// y = W x + b, W is (out x in) row-major
inline void affine(const Tensor& W, const Tensor& b, const double* x, double* y) {
    const std::size_t out = W.dims[0], in = W.dims[1];
    for (std::size_t o = 0; o < out; ++o)
        y[o] = dot(&W.v[o * in], x, in) + b.v[o];
}

// backward of affine: accumulates dW, db, dx (dx may be null)
inline void affine_bwd(const Tensor& W, const double* x, const double* dy, Tensor& dW,
                       Tensor& db, double* dx) {
    const std::size_t out = W.dims[0], in = W.dims[1];
    for (std::size_t o = 0; o < out; ++o) {
        const double g = dy[o];
        db.v[o] += g;
        double* dwrow = &dW.v[o * in];
        const double* wrow = &W.v[o * in];
        for (std::size_t i = 0; i < in; ++i) {
            dwrow[i] += g * x[i];
            if (dx) dx[i] += g * wrow[i];
        }
    }
}

inline double softplus(double x) {
    return x > 30.0 ? x : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// in-place softmax over n entries, returns logsumexp
inline double softmax_inplace(double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::exp(x[i] - m);
        s += x[i];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] /= s;
    return m + std::log(s);
}

inline double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

// FNV-1a over a byte string; used for config hashes in reports
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace sidetalk
