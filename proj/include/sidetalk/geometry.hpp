// Smart-glasses microphone array geometry and the discrete source
// placement grid (8 azimuths x {0.5, 2} m x {-0.5, 0, +0.5} m height x
// {-45, 0, +45} deg elevation), head-centered coordinates in meters.
//
// Axes: +x forward (nose direction), +y left, +z up.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sidetalk {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct MicArrayGeometry {
    std::vector<Vec3> mic_positions;
    double sample_rate = 16000.0;
    double speed_of_sound = 343.0;

    std::size_t num_mics() const { return mic_positions.size(); }
};

// Fixed head-frame constants. Channel order: nose bridge first, then the four
// arm mics (left upper/lower, right upper/lower). The wearer's mouth sits a
// few centimeters below and behind the nose bridge, which gives the wearer a
// strong near-field gain and delay signature across the array.
inline Vec3 wearer_mouth_position() { return {0.070, 0.000, -0.090}; }

struct GeometryOverrides {
    std::vector<Vec3> mic_positions;  // empty = default 5-mic layout
    double sample_rate = 16000.0;
    double speed_of_sound = 343.0;
};

inline MicArrayGeometry build_geometry(const GeometryOverrides& ov = {}) {
    if (ov.sample_rate <= 0.0) throw std::invalid_argument("sample_rate must be positive");
    if (ov.speed_of_sound <= 0.0) throw std::invalid_argument("speed_of_sound must be positive");
    MicArrayGeometry g;
    g.sample_rate = ov.sample_rate;
    g.speed_of_sound = ov.speed_of_sound;
    if (!ov.mic_positions.empty()) {
        g.mic_positions = ov.mic_positions;
    } else {
        g.mic_positions = {
            {0.082, 0.000, -0.012},   // nose bridge
            {0.045, 0.072, 0.008},    // left arm, upper
            {0.040, 0.072, -0.010},   // left arm, lower
            {0.045, -0.072, 0.008},   // right arm, upper
            {0.040, -0.072, -0.010},  // right arm, lower
        };
    }
    if (g.mic_positions.empty()) throw std::invalid_argument("need at least one microphone");
    for (const auto& p : g.mic_positions)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw std::invalid_argument("mic position not finite");
    return g;
}

struct SourcePose {
    double azimuth_deg = 0.0;    // multiples of 45
    double distance_m = 0.5;     // {0.5, 2.0}
    double height_offset_m = 0.0;  // {-0.5, 0, +0.5}
    double elevation_deg = 0.0;  // {-45, 0, +45}
};

inline bool pose_on_grid(const SourcePose& p) {
    const double az = std::fmod(std::fmod(p.azimuth_deg, 360.0) + 360.0, 360.0);
    const bool az_ok = std::abs(az / 45.0 - std::round(az / 45.0)) < 1e-9;
    const bool d_ok = p.distance_m == 0.5 || p.distance_m == 2.0;
    const bool h_ok =
        p.height_offset_m == -0.5 || p.height_offset_m == 0.0 || p.height_offset_m == 0.5;
    const bool e_ok =
        p.elevation_deg == -45.0 || p.elevation_deg == 0.0 || p.elevation_deg == 45.0;
    return az_ok && d_ok && h_ok && e_ok;
}

// Spherical-to-Cartesian: distance is slant range, elevation tilts out of the
// horizontal plane, height offset shifts the result vertically.
inline Vec3 place_source(double azimuth_deg, double distance_m, double height_offset_m,
                         double elevation_deg, bool allow_off_grid = false) {
    const SourcePose pose{azimuth_deg, distance_m, height_offset_m, elevation_deg};
    if (!allow_off_grid && !pose_on_grid(pose))
        throw std::invalid_argument("source pose off the placement grid (pass allow_off_grid)");
    const double az = azimuth_deg * M_PI / 180.0;
    const double el = elevation_deg * M_PI / 180.0;
    Vec3 p;
    p.x = distance_m * std::cos(el) * std::cos(az);
    p.y = distance_m * std::cos(el) * std::sin(az);
    p.z = distance_m * std::sin(el) + height_offset_m;
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        throw std::invalid_argument("derived source position not finite");
    return p;
}

inline Vec3 place_source(const SourcePose& pose, bool allow_off_grid = false) {
    return place_source(pose.azimuth_deg, pose.distance_m, pose.height_offset_m,
                        pose.elevation_deg, allow_off_grid);
}

}  // namespace sidetalk
