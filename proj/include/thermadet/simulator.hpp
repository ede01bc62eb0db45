#pragma once

#include "thermadet/manifest.hpp"
#include "thermadet/rng.hpp"
#include "thermadet/types.hpp"

#include <cmath>
#include <complex>
#include <filesystem>

namespace thermadet::sim {

// Coefficients of the thermal-balance polynomial plus the temporal and
// sensor parameters of the rendering model. Units are sensor counts.
struct ThermalConstants {
    double k1 = 1.0;   // counts per squared field magnitude
    double k2 = 0.1;   // counts per field magnitude
    double k3 = 0.0;   // constant offset
    double tau = 20.0;     // heating time constant, in frame intervals
    double ambient = 7000.0;   // ambient level in counts
    double noise_sd = 15.0;    // per-pixel sensor noise SD in counts

    void validate() const {
        if (!(k1 > 0.0)) throw std::invalid_argument("ThermalConstants: k1 must be > 0");
        if (!(tau > 0.0)) throw std::invalid_argument("ThermalConstants: tau must be > 0");
        if (noise_sd < 0.0) throw std::invalid_argument("ThermalConstants: noise_sd must be >= 0");
        if (ambient < 0.0) throw std::invalid_argument("ThermalConstants: ambient must be >= 0");
    }
};

// Input power in dBm for a gain code on one array element (1..4).
// Exact at tabulated codes, piecewise-linear in between.
double gain_to_power(int gain, int element_index);

// Quadrant-center pixel of element k (0..3) on an h-by-w grid,
// as (row, col). Element order: tl, tr, bl, br.
inline std::pair<int, int> element_center(int k, int h, int w) {
    const int r = (k < 2) ? h / 4 : h - h / 4;
    const int c = (k % 2 == 0) ? w / 4 : w - w / 4;
    return {r, c};
}

// Field magnitude map: coherent superposition of one Gaussian kernel per
// element, amplitude 10^((P_k - A_k)/20), phase from the configuration.
template <typename Scalar>
Image<Scalar> synthesize_field(const ArrayConfig& config, const FaultSpec& fault, int h, int w,
                               double kernel_width = -1.0) {
    if (h < 8 || w < 8) throw std::invalid_argument("synthesize_field: grid must be at least 8x8");
    fault.validate();
    const double width = kernel_width > 0.0 ? kernel_width : h / 4.0;

    std::array<std::complex<double>, 4> amp;
    std::array<std::pair<int, int>, 4> center;
    for (int k = 0; k < 4; ++k) {
        const double p_dbm = gain_to_power(config.elements[k].gain, k + 1);
        const double a = std::pow(10.0, (p_dbm - fault.attenuation_db[k]) / 20.0);
        const double phase = config.elements[k].phase * 3.14159265358979323846 / 180.0;
        amp[k] = std::polar(a, phase);
        center[k] = element_center(k, h, w);
    }

    Image<Scalar> field(h, w);
    const double inv_two_w2 = 1.0 / (2.0 * width * width);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            std::complex<double> sum{0.0, 0.0};
            for (int k = 0; k < 4; ++k) {
                const double dr = r - center[k].first;
                const double dc = c - center[k].second;
                sum += amp[k] * std::exp(-(dr * dr + dc * dc) * inv_two_w2);
            }
            field(r, c) = static_cast<Scalar>(std::abs(sum));
        }
    }
    return field;
}

// Variant with explicit amplitudes (used by tests to force degenerate cases,
// e.g. all-zero amplitude).
template <typename Scalar>
Image<Scalar> synthesize_field_amplitudes(const std::array<double, 4>& amplitudes,
                                          const std::array<int, 4>& phases_deg, int h, int w,
                                          double kernel_width = -1.0) {
    if (h < 8 || w < 8) throw std::invalid_argument("synthesize_field: grid must be at least 8x8");
    const double width = kernel_width > 0.0 ? kernel_width : h / 4.0;
    Image<Scalar> field(h, w);
    const double inv_two_w2 = 1.0 / (2.0 * width * width);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            std::complex<double> sum{0.0, 0.0};
            for (int k = 0; k < 4; ++k) {
                auto [cr, cc] = element_center(k, h, w);
                const double dr = r - cr, dc = c - cc;
                const double g = std::exp(-(dr * dr + dc * dc) * inv_two_w2);
                sum += std::polar(amplitudes[k], phases_deg[k] * 3.14159265358979323846 / 180.0) * g;
            }
            field(r, c) = static_cast<Scalar>(std::abs(sum));
        }
    }
    return field;
}

// Equilibrium temperature rise over ambient: k1*E^2 + k2*E + k3, elementwise.
template <typename Scalar>
Image<Scalar> equilibrium_delta(const Image<Scalar>& field, const ThermalConstants& constants) {
    if ((field.array() < Scalar(0)).any()) throw std::invalid_argument("equilibrium_delta: field must be non-negative");
    return (constants.k1 * field.array().square() + constants.k2 * field.array() + constants.k3).matrix();
}

// Renders the full heating sequence. Frame t is
//   quantize(ambient + delta_eq * (1 - exp(-t/tau)) + noise),
// so frame 0 is the pre-radiation background. Bit-identical for equal inputs.
RawSequence render_sequence(const ArrayConfig& config, const FaultSpec& fault, const ThermalConstants& constants,
                            int h, int w, int n_frames, uint64_t seed, double kernel_width = -1.0);

// What to generate and where. Anomalous sequences reuse the configurations
// that the deterministic split assigns to the normal test subset, so the
// test set ends up balanced per configuration.
struct DatasetSpec {
    int n_normal = 0;
    int n_anomalous = 0;
    int height = 32;
    int width = 32;
    int n_frames = 100;
    double kernel_width = -1.0;  // <= 0 means h/4
    ThermalConstants constants;
    std::vector<int> gain_set = valid_gain_codes();
    std::vector<int> phase_set = valid_phase_degrees();
    double fault_db_min = 6.0;
    double fault_db_max = 12.0;
    uint64_t seed = 0;
    uint64_t split_seed = 0;  // must match the dataset stage's split seed
    double train_ratio = 0.8, val_ratio = 0.1, test_ratio = 0.1;
};

// Writes frames (16-bit TIFF, one file per frame) and the JSONL manifest.
// Returns the manifest in generation order (normals first).
Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir);

// Uniform draw from the gain/phase value sets.
ArrayConfig sample_config(const std::vector<int>& gain_set, const std::vector<int>& phase_set, Rng& rng);

// One uniformly chosen element attenuated by U[fault_db_min, fault_db_max].
FaultSpec sample_fault(double db_min, double db_max, Rng& rng);

}  // namespace thermadet::sim
