// Scene serialization: multi-channel 16-bit PCM RIFF WAVE plus a sidecar
// text file (hop, frame labels, utterance label, reference transcript), and
// the manifest CSV listing the scenes of a dataset split.
//
// Waveforms are synthesized on the 16-bit grid, so write/read round-trips are
// bit-exact.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidetalk/scene.hpp"

namespace sidetalk {

namespace detail {

inline void put_u16(std::ostream& os, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    os.write(b, 2);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    os.write(b, 4);
}

inline std::uint16_t get_u16(std::istream& is) {
    unsigned char b[2];
    is.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0] | (b[1] << 8) | (b[2] << 16) |
                                      (static_cast<std::uint32_t>(b[3]) << 24));
}

inline std::int16_t encode_i16(double x) {
    double q = std::round(x * 32768.0);
    q = std::clamp(q, -32768.0, 32767.0);
    return static_cast<std::int16_t>(q);
}

}  // namespace detail

inline void write_wav(const std::string& path, const MultiChannelWaveform& w) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    const std::uint16_t channels = static_cast<std::uint16_t>(w.num_channels());
    const std::uint32_t rate = static_cast<std::uint32_t>(w.sample_rate);
    const std::uint32_t frames = static_cast<std::uint32_t>(w.num_samples());
    const std::uint16_t block_align = channels * 2;
    const std::uint32_t data_bytes = frames * block_align;

    os.write("RIFF", 4);
    detail::put_u32(os, 36 + data_bytes);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    detail::put_u32(os, 16);
    detail::put_u16(os, 1);  // PCM
    detail::put_u16(os, channels);
    detail::put_u32(os, rate);
    detail::put_u32(os, rate * block_align);
    detail::put_u16(os, block_align);
    detail::put_u16(os, 16);
    os.write("data", 4);
    detail::put_u32(os, data_bytes);
    for (std::uint32_t n = 0; n < frames; ++n) {
        for (std::uint16_t c = 0; c < channels; ++c) {
            const std::int16_t s = detail::encode_i16(w.channels[c][n]);
            detail::put_u16(os, static_cast<std::uint16_t>(s));
        }
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline MultiChannelWaveform read_wav(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char tag[5] = {0};
    is.read(tag, 4);
    if (std::string(tag, 4) != "RIFF") throw std::runtime_error(path + ": not a RIFF file");
    detail::get_u32(is);
    is.read(tag, 4);
    if (std::string(tag, 4) != "WAVE") throw std::runtime_error(path + ": not a WAVE file");

    std::uint16_t channels = 0, bits = 0;
    std::uint32_t rate = 0, data_bytes = 0;
    bool have_fmt = false;
    std::streampos data_pos = -1;
    while (is.read(tag, 4)) {
        const std::uint32_t sz = detail::get_u32(is);
        const std::string id(tag, 4);
        if (id == "fmt ") {
            const std::uint16_t fmt = detail::get_u16(is);
            channels = detail::get_u16(is);
            rate = detail::get_u32(is);
            detail::get_u32(is);
            detail::get_u16(is);
            bits = detail::get_u16(is);
            if (sz > 16) is.seekg(sz - 16, std::ios::cur);
            if (fmt != 1 || bits != 16)
                throw std::runtime_error(path + ": expected 16-bit PCM");
            have_fmt = true;
        } else if (id == "data") {
            data_bytes = sz;
            data_pos = is.tellg();
            is.seekg(sz, std::ios::cur);
        } else {
            is.seekg(sz, std::ios::cur);
        }
    }
    if (!have_fmt || data_pos == std::streampos(-1) || channels == 0)
        throw std::runtime_error(path + ": missing fmt or data chunk");

    is.clear();
    is.seekg(data_pos);
    const std::uint32_t frames = data_bytes / (channels * 2);
    MultiChannelWaveform w;
    w.sample_rate = rate;
    w.channels.assign(channels, std::vector<double>(frames, 0.0));
    for (std::uint32_t n = 0; n < frames; ++n) {
        for (std::uint16_t c = 0; c < channels; ++c) {
            unsigned char b[2];
            if (!is.read(reinterpret_cast<char*>(b), 2))
                throw std::runtime_error(path + ": wave data truncated at sample frame " +
                                         std::to_string(n) + ", channel " + std::to_string(c));
            const std::int16_t s = static_cast<std::int16_t>(b[0] | (b[1] << 8));
            w.channels[c][n] = s / 32768.0;
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Sidecar label file
// ---------------------------------------------------------------------------

inline void write_sidecar(const std::string& path, const LabeledScene& scene) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "hop " << scene.frame_labels.hop_samples << "\n";
    os << "labels ";
    for (FrameClass c : scene.frame_labels.labels) os << class_to_char(c);
    os << "\n";
    os << "utt " << class_to_char(scene.utt_label.dominant) << "\n";
    os << "ref";
    for (const auto& w : scene.reference_transcript) os << ' ' << w;
    os << "\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline void read_sidecar(const std::string& path, LabeledScene& scene) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
    };

    if (!std::getline(is, line)) fail("missing hop line");
    ++lineno;
    {
        std::istringstream ls(line);
        std::string key;
        int hop = 0;
        if (!(ls >> key >> hop) || key != "hop" || hop <= 0) fail("malformed hop line");
        scene.frame_labels.hop_samples = hop;
    }

    if (!std::getline(is, line)) fail("missing labels line");
    ++lineno;
    {
        if (line.rfind("labels ", 0) != 0) fail("malformed labels line");
        const std::string body = line.substr(7);
        if (body.empty()) fail("empty label sequence");
        scene.frame_labels.labels.clear();
        for (std::size_t i = 0; i < body.size(); ++i) {
            try {
                scene.frame_labels.labels.push_back(class_from_char(body[i]));
            } catch (const std::invalid_argument&) {
                fail("unknown class token '" + std::string(1, body[i]) + "' at frame " +
                     std::to_string(i));
            }
        }
    }

    if (!std::getline(is, line)) fail("missing utt line");
    ++lineno;
    {
        std::istringstream ls(line);
        std::string key, val;
        if (!(ls >> key >> val) || key != "utt" || val.size() != 1) fail("malformed utt line");
        try {
            scene.utt_label.dominant = class_from_char(val[0]);
        } catch (const std::invalid_argument&) {
            fail("unknown class token '" + val + "'");
        }
    }

    if (!std::getline(is, line)) fail("missing ref line");
    ++lineno;
    {
        if (line.rfind("ref", 0) != 0) fail("malformed ref line");
        scene.reference_transcript = split_words(line.substr(3));
    }
}

// ---------------------------------------------------------------------------
// Scene read/write and manifest
// ---------------------------------------------------------------------------

inline void write_scene(const std::string& base_path, const LabeledScene& scene) {
    write_wav(base_path + ".wav", scene.waves);
    write_sidecar(base_path + ".txt", scene);
}

inline LabeledScene read_scene(const std::string& base_path) {
    LabeledScene scene;
    scene.waves = read_wav(base_path + ".wav");
    read_sidecar(base_path + ".txt", scene);
    const std::size_t expect =
        (scene.waves.num_samples() + scene.frame_labels.hop_samples - 1) /
        scene.frame_labels.hop_samples;
    if (scene.frame_labels.labels.size() != expect)
        throw std::runtime_error(base_path + ": label count " +
                                 std::to_string(scene.frame_labels.labels.size()) +
                                 " does not match frame count " + std::to_string(expect));
    return scene;
}

struct ManifestEntry {
    std::string id;
    std::string base_path;  // relative to the manifest's directory
};

inline void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "id,base_path\n";
    for (const auto& e : entries) os << e.id << ',' << e.base_path << "\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::vector<ManifestEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;  // header
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
        entries.push_back({line.substr(0, comma), line.substr(comma + 1)});
    }
    return entries;
}

inline std::string manifest_dir(const std::string& manifest_path) {
    return std::filesystem::path(manifest_path).parent_path().string();
}

}  // namespace sidetalk
