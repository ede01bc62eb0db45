#pragma once

#include "thermadet/manifest.hpp"
#include "thermadet/types.hpp"

#include <filesystem>
#include <map>
#include <optional>

namespace thermadet::data {

// Background subtraction (frame 0), clamp at zero, then divide by the
// sequence-wide maximum. Output has T_raw - 1 frames, all values in [0, 1].
ProcessedSequence preprocess(const RawSequence& raw);

struct WindowSpec {
    int length = 10;
    int offset = 5;
};

// Start indices of the fully contained sliding windows: 0, offset, 2*offset, ...
std::vector<int> window_starts(int n_frames, const WindowSpec& spec);

// Normalized per-element values used by both condition encodings.
inline double normalized_gain(int gain) {
    const double g = (gain - 155.0) / 100.0;
    return g < 0.0 ? 0.0 : (g > 1.0 ? 1.0 : g);
}
inline double normalized_phase(int phase) {
    const double p = phase / 180.0;
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

// Spatial condition: channel 0 holds normalized gains, channel 1 normalized
// phases, each image quadrant filled with its element's value. Returned as a
// 2 x (h*w) matrix with row-major pixel order.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, Eigen::Dynamic> condition_input_map(const ArrayConfig& config, int h, int w) {
    if (h % 2 != 0 || w % 2 != 0) throw std::invalid_argument("condition_input_map: H and W must be even");
    Eigen::Matrix<Scalar, 2, Eigen::Dynamic> map(2, h * w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const int k = (r < h / 2 ? 0 : 2) + (c < w / 2 ? 0 : 1);
            map(0, r * w + c) = static_cast<Scalar>(normalized_gain(config.elements[k].gain));
            map(1, r * w + c) = static_cast<Scalar>(normalized_phase(config.elements[k].phase));
        }
    }
    return map;
}

// Latent-space condition: [g1..g4, p1..p4], same normalization as the map.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> condition_vector(const ArrayConfig& config) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(8);
    for (int k = 0; k < 4; ++k) {
        v(k) = static_cast<Scalar>(normalized_gain(config.elements[k].gain));
        v(4 + k) = static_cast<Scalar>(normalized_phase(config.elements[k].phase));
    }
    return v;
}

enum class Split { Train, Val, Test };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        default: return "test";
    }
}

using SplitAssignment = std::map<std::string, Split>;

// Deterministic 80/10/10 partition of the normal ids (pure function of the
// id set and seed); anomalous ids are forced to test.
SplitAssignment split(const Manifest& manifest, uint64_t seed, double train_ratio = 0.8, double val_ratio = 0.1,
                      double test_ratio = 0.1);

// Underlying partition over an id list; used by both split() and the
// generator's designation of test configurations.
std::vector<Split> split_ids(std::vector<std::string> ids, uint64_t seed, double train_ratio, double val_ratio,
                             double test_ratio);

void write_split(const std::filesystem::path& path, const SplitAssignment& a);
SplitAssignment read_split(const std::filesystem::path& path);

// Versioned binary container for processed sequences (32-bit float frames,
// little-endian). Lossless round trip of frames, config, label and id.
void store_processed(const std::filesystem::path& path, const ProcessedSequence& seq);
ProcessedSequence load_processed(const std::filesystem::path& path);

}  // namespace thermadet::data
