// Delay-and-sum beamformer. Steering delay s_i shifts channel i so that a
// source with propagation delays d_i adds coherently: out[n] = mean_i x_i[n - s_i].
#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "sidetalk/geometry.hpp"
#include "sidetalk/scene.hpp"

namespace sidetalk {

// Delays that align a source at `position`: s_i = min_j d_j - d_i (<= 0).
inline std::vector<long> steering_delays(const MicArrayGeometry& geometry, const Vec3& position) {
    const std::vector<long> d = propagation_delays(position, geometry);
    long dmin = d[0];
    for (long v : d) dmin = std::min(dmin, v);
    std::vector<long> s(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) s[i] = dmin - d[i];
    return s;
}

inline std::vector<double> delay_and_sum(const MultiChannelWaveform& waves,
                                         const std::vector<long>& steering) {
    if (steering.size() != waves.num_channels())
        throw std::invalid_argument("one steering delay per channel required");
    const long n = static_cast<long>(waves.num_samples());
    for (long s : steering)
        if (std::labs(s) >= n) throw std::invalid_argument("steering delay exceeds signal length");
    std::vector<double> out(n, 0.0);
    const double inv_m = 1.0 / static_cast<double>(waves.num_channels());
    for (std::size_t c = 0; c < waves.num_channels(); ++c) {
        const auto& ch = waves.channels[c];
        const long s = steering[c];
        for (long i = 0; i < n; ++i) {
            const long j = i - s;
            if (j >= 0 && j < n) out[i] += inv_m * ch[j];
        }
    }
    return out;
}

}  // namespace sidetalk
