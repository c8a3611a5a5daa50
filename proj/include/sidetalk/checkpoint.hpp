// Checkpoint archive: versioned text header, a text index of tensors
// (name, dtype, shape, byte offset), then one flat binary blob of f64 data.
#pragma once

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidetalk/tensor.hpp"

namespace sidetalk {

inline constexpr const char* kCheckpointMagic = "SIDETALK-CKPT";
inline constexpr int kCheckpointVersion = 1;

inline void save_checkpoint(const std::string& path, const ParamSet& ps) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << kCheckpointMagic << ' ' << kCheckpointVersion << "\n";
    os << "tensors " << ps.size() << "\n";
    std::size_t offset = 0;
    for (const auto& p : ps) {
        os << p.name << " f64 " << p.value->dims.size();
        for (std::size_t d : p.value->dims) os << ' ' << d;
        os << ' ' << offset << "\n";
        offset += p.value->size() * sizeof(double);
    }
    os << "data " << offset << "\n";
    for (const auto& p : ps)
        os.write(reinterpret_cast<const char*>(p.value->v.data()),
                 static_cast<std::streamsize>(p.value->size() * sizeof(double)));
    if (!os) throw std::runtime_error("write failed: " + path);
}

// Loads into an identically structured ParamSet; any mismatch in names or
// shapes is an error (a checkpoint from a different configuration).
inline void load_checkpoint(const std::string& path, ParamSet& ps) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != kCheckpointMagic)
        throw std::runtime_error(path + ": not a checkpoint file");
    if (version != kCheckpointVersion)
        throw std::runtime_error(path + ": unsupported checkpoint version " +
                                 std::to_string(version));
    std::string key;
    std::size_t count = 0;
    is >> key >> count;
    if (key != "tensors") throw std::runtime_error(path + ": malformed tensor count");
    if (count != ps.size())
        throw std::runtime_error(path + ": checkpoint holds " + std::to_string(count) +
                                 " tensors, expected " + std::to_string(ps.size()));
    struct Entry {
        std::string name;
        std::vector<std::size_t> dims;
        std::size_t offset;
    };
    std::vector<Entry> entries(count);
    for (auto& e : entries) {
        std::string dtype;
        std::size_t ndim = 0;
        is >> e.name >> dtype >> ndim;
        if (dtype != "f64") throw std::runtime_error(path + ": unsupported dtype " + dtype);
        e.dims.resize(ndim);
        for (auto& d : e.dims) is >> d;
        is >> e.offset;
    }
    std::size_t nbytes = 0;
    is >> key >> nbytes;
    if (key != "data") throw std::runtime_error(path + ": malformed data header");
    is.ignore(1);  // newline before the blob

    const std::streampos blob = is.tellg();
    for (std::size_t i = 0; i < count; ++i) {
        const Entry& e = entries[i];
        ParamRef& p = ps[i];
        if (e.name != p.name)
            throw std::runtime_error(path + ": tensor '" + e.name + "' where '" + p.name +
                                     "' was expected (incompatible checkpoint)");
        if (e.dims != p.value->dims)
            throw std::runtime_error(path + ": shape mismatch for '" + e.name + "'");
        is.seekg(blob + static_cast<std::streamoff>(e.offset));
        is.read(reinterpret_cast<char*>(p.value->v.data()),
                static_cast<std::streamsize>(p.value->size() * sizeof(double)));
        if (!is) throw std::runtime_error(path + ": truncated data for '" + e.name + "'");
    }
}

}  // namespace sidetalk
