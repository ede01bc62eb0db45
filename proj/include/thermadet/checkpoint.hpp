#pragma once

#include "thermadet/model.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace thermadet::model {

namespace detail {

constexpr char kCkptMagic[8] = {'T', 'D', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void wpod(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T rpod(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

inline void write_config(std::ofstream& f, const ModelConfig& c) {
    wpod(f, static_cast<int32_t>(c.height));
    wpod(f, static_cast<int32_t>(c.width));
    for (int ch : c.conv_channels) wpod(f, static_cast<int32_t>(ch));
    wpod(f, static_cast<int32_t>(c.kernel));
    wpod(f, static_cast<int32_t>(c.stride));
    wpod(f, static_cast<int32_t>(c.hidden_dim));
    wpod(f, static_cast<int32_t>(c.latent_dim));
    wpod(f, static_cast<int32_t>(c.cond_map_channels));
    wpod(f, static_cast<int32_t>(c.cond_vec_dim));
    wpod(f, static_cast<uint8_t>(c.variant));
    wpod(f, c.beta);
    wpod(f, c.logvar_clamp);
}

inline ModelConfig read_config(std::ifstream& f) {
    ModelConfig c;
    c.height = rpod<int32_t>(f);
    c.width = rpod<int32_t>(f);
    for (int& ch : c.conv_channels) ch = rpod<int32_t>(f);
    c.kernel = rpod<int32_t>(f);
    c.stride = rpod<int32_t>(f);
    c.hidden_dim = rpod<int32_t>(f);
    c.latent_dim = rpod<int32_t>(f);
    c.cond_map_channels = rpod<int32_t>(f);
    c.cond_vec_dim = rpod<int32_t>(f);
    c.variant = static_cast<Variant>(rpod<uint8_t>(f));
    c.beta = rpod<double>(f);
    c.logvar_clamp = rpod<double>(f);
    return c;
}

}  // namespace detail

// Versioned binary checkpoint: variant tag, architecture hyperparameters and
// named flat parameter arrays. Round trip is bit-exact for the same scalar.
template <typename S>
void save_checkpoint(const std::filesystem::path& path, const SeqVae<S>& m) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("checkpoint: cannot open for writing: " + path.string());
    f.write(detail::kCkptMagic, sizeof(detail::kCkptMagic));
    detail::wpod(f, static_cast<uint8_t>(sizeof(S)));
    detail::write_config(f, m.config());
    const auto& ps = m.params();
    detail::wpod(f, static_cast<uint32_t>(ps.tensors.size()));
    for (size_t i = 0; i < ps.tensors.size(); ++i) {
        const auto& name = ps.names[i];
        detail::wpod(f, static_cast<uint32_t>(name.size()));
        f.write(name.data(), static_cast<std::streamsize>(name.size()));
        detail::wpod(f, static_cast<uint64_t>(ps.tensors[i].rows()));
        detail::wpod(f, static_cast<uint64_t>(ps.tensors[i].cols()));
        f.write(reinterpret_cast<const char*>(ps.tensors[i].data()),
                static_cast<std::streamsize>(sizeof(S) * ps.tensors[i].size()));
    }
    if (!f) throw std::runtime_error("checkpoint: write failed: " + path.string());
}

inline ModelConfig read_checkpoint_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open: " + path.string());
    char magic[8];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, detail::kCkptMagic, sizeof(magic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    detail::rpod<uint8_t>(f);  // scalar width
    return detail::read_config(f);
}

template <typename S>
SeqVae<S> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open: " + path.string());
    char magic[8];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, detail::kCkptMagic, sizeof(magic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    const auto scalar_width = detail::rpod<uint8_t>(f);
    if (scalar_width != sizeof(S))
        throw std::runtime_error("checkpoint: scalar width mismatch (file " + std::to_string(scalar_width) +
                                 ", requested " + std::to_string(sizeof(S)) + ")");
    const ModelConfig cfg = detail::read_config(f);
    SeqVae<S> m(cfg);
    auto& ps = m.params();
    const auto count = detail::rpod<uint32_t>(f);
    if (count != ps.tensors.size())
        throw std::runtime_error("checkpoint: parameter count mismatch (architecture differs)");
    for (uint32_t i = 0; i < count; ++i) {
        const auto name_len = detail::rpod<uint32_t>(f);
        std::string name(name_len, '\0');
        f.read(name.data(), name_len);
        const auto rows = detail::rpod<uint64_t>(f);
        const auto cols = detail::rpod<uint64_t>(f);
        if (!f || name != ps.names[i] || rows != static_cast<uint64_t>(ps.tensors[i].rows()) ||
            cols != static_cast<uint64_t>(ps.tensors[i].cols()))
            throw std::runtime_error("checkpoint: tensor layout mismatch at " + name);
        f.read(reinterpret_cast<char*>(ps.tensors[i].data()),
               static_cast<std::streamsize>(sizeof(S) * ps.tensors[i].size()));
        if (!f) throw std::runtime_error("checkpoint: truncated file");
    }
    return m;
}

// Load and require a specific variant.
template <typename S>
SeqVae<S> load_checkpoint(const std::filesystem::path& path, Variant expected) {
    const auto cfg = read_checkpoint_config(path);
    if (cfg.variant != expected)
        throw std::runtime_error(std::string("checkpoint: variant mismatch (file has ") +
                                 variant_name(cfg.variant) + ", requested " + variant_name(expected) + ")");
    return load_checkpoint<S>(path);
}

}  // namespace thermadet::model
