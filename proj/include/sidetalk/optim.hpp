// Adam with a warmup + linear-decay learning-rate schedule.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sidetalk/tensor.hpp"

namespace sidetalk {

struct LrSchedule {
    double base = 1e-3;
    std::size_t warmup = 200;
    std::size_t max_steps = 5000;

    // 1-based step index; linear ramp to base, then linear decay to zero
    double at(std::size_t step) const {
        if (max_steps <= warmup) return base;
        if (step <= warmup) return base * static_cast<double>(step) / static_cast<double>(warmup);
        if (step >= max_steps) return 0.0;
        return base * static_cast<double>(max_steps - step) /
               static_cast<double>(max_steps - warmup);
    }
};

class Adam {
public:
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    void reset(const ParamSet& ps) {
        std::size_t n = 0;
        for (const auto& p : ps)
            if (p.trainable) n += p.value->size();
        m_.assign(n, 0.0);
        v_.assign(n, 0.0);
        t_ = 0;
    }

    std::size_t steps_taken() const { return t_; }

    void step(ParamSet& ps, double lr) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
        std::size_t off = 0;
        for (auto& p : ps) {
            if (!p.trainable) continue;
            const std::size_t n = p.value->size();
            if (off + n > m_.size()) throw std::runtime_error("optimizer state size mismatch");
            for (std::size_t i = 0; i < n; ++i) {
                const double g = p.grad->v[i];
                double& m = m_[off + i];
                double& v = v_[off + i];
                m = beta1 * m + (1.0 - beta1) * g;
                v = beta2 * v + (1.0 - beta2) * g * g;
                const double mhat = m / bc1;
                const double vhat = v / bc2;
                p.value->v[i] -= lr * mhat / (std::sqrt(vhat) + eps);
            }
            off += n;
        }
        if (off != m_.size()) throw std::runtime_error("optimizer walked a different param set");
    }

private:
    std::vector<double> m_, v_;
    std::size_t t_ = 0;
};

}  // namespace sidetalk
