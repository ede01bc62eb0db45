#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermadet {

// A single frame, H rows by W columns.
template <typename Scalar>
using Image = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Image16 = Eigen::Matrix<uint16_t, Eigen::Dynamic, Eigen::Dynamic>;
using ImageF = Image<float>;
using ImageD = Image<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline const std::vector<int>& valid_gain_codes() {
    static const std::vector<int> v{155, 160, 170, 185, 235, 255};
    return v;
}

inline const std::vector<int>& valid_phase_degrees() {
    static const std::vector<int> v{0, 45, 90, 135, 180};
    return v;
}

struct GainPhase {
    int gain = 155;
    int phase = 0;
};

// Input-signal configuration for the 2x2 array: one (gain code, phase) pair
// per element, ordered top-left, top-right, bottom-left, bottom-right.
struct ArrayConfig {
    std::array<GainPhase, 4> elements{};

    void validate() const {
        for (const auto& e : elements) {
            bool gain_ok = false, phase_ok = false;
            for (int g : valid_gain_codes()) gain_ok |= (e.gain == g);
            for (int p : valid_phase_degrees()) phase_ok |= (e.phase == p);
            if (!gain_ok) throw std::invalid_argument("ArrayConfig: gain code " + std::to_string(e.gain) + " not in value set");
            if (!phase_ok) throw std::invalid_argument("ArrayConfig: phase " + std::to_string(e.phase) + " not in value set");
        }
    }

    bool operator==(const ArrayConfig& o) const {
        for (int k = 0; k < 4; ++k)
            if (elements[k].gain != o.elements[k].gain || elements[k].phase != o.elements[k].phase) return false;
        return true;
    }
};

// Per-element attenuation in dB; 0 means the element is healthy.
struct FaultSpec {
    std::array<double, 4> attenuation_db{0.0, 0.0, 0.0, 0.0};

    bool anomalous() const {
        for (double a : attenuation_db)
            if (a > 0.0) return true;
        return false;
    }

    void validate() const {
        for (double a : attenuation_db)
            if (a < 0.0) throw std::invalid_argument("FaultSpec: attenuation must be non-negative");
    }
};

enum class Label { Normal, Anomalous };

inline const char* label_name(Label l) { return l == Label::Normal ? "normal" : "anomalous"; }

inline Label label_from_name(const std::string& s) {
    if (s == "normal") return Label::Normal;
    if (s == "anomalous") return Label::Anomalous;
    throw std::invalid_argument("unknown label: " + s);
}

// Raw sensor-count sequence as rendered (or as it would come off a camera).
// Frame 0 is the pre-radiation background.
struct RawSequence {
    std::vector<Image16> frames;
    ArrayConfig config;
    FaultSpec fault;
    uint64_t seed = 0;
    std::string id;
};

// Background-subtracted, per-sequence normalized sequence in [0, 1].
struct ProcessedSequence {
    std::vector<ImageF> frames;
    ArrayConfig config;
    Label label = Label::Normal;
    std::string id;
};

}  // namespace thermadet
