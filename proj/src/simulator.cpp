#include "thermadet/simulator.hpp"

#include "thermadet/dataset.hpp"
#include "thermadet/rng.hpp"
#include "thermadet/tiff.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace thermadet::sim {

namespace {

// Gain code -> input power (dBm), one column per array element.
struct GainRow {
    int gain;
    double power[4];
};

constexpr GainRow kGainTable[] = {
    {155, {7.65, 7.47, 7.18, 9.40}},
    {160, {9.40, 9.38, 8.99, 11.09}},
    {170, {12.57, 12.48, 12.21, 13.92}},
    {185, {16.03, 15.85, 15.65, 17.03}},
    {235, {21.91, 21.58, 21.30, 22.15}},
    {255, {22.81, 22.41, 22.00, 22.81}},
};
constexpr int kGainRows = static_cast<int>(sizeof(kGainTable) / sizeof(kGainTable[0]));

uint16_t quantize(double v) {
    const double r = std::nearbyint(v);
    if (r <= 0.0) return 0;
    if (r >= 65535.0) return 65535;
    return static_cast<uint16_t>(r);
}

std::string sequence_dir_name(const std::string& id) { return "raw/" + id; }

}  // namespace

double gain_to_power(int gain, int element_index) {
    if (element_index < 1 || element_index > 4)
        throw std::out_of_range("gain_to_power: element index must be in 1..4");
    if (gain < kGainTable[0].gain || gain > kGainTable[kGainRows - 1].gain)
        throw std::out_of_range("gain_to_power: gain " + std::to_string(gain) + " outside [155, 255]");

    const int col = element_index - 1;
    for (int i = 0; i < kGainRows; ++i)
        if (kGainTable[i].gain == gain) return kGainTable[i].power[col];

    int hi = 1;
    while (kGainTable[hi].gain < gain) ++hi;
    const auto& a = kGainTable[hi - 1];
    const auto& b = kGainTable[hi];
    const double t = static_cast<double>(gain - a.gain) / static_cast<double>(b.gain - a.gain);
    return a.power[col] + t * (b.power[col] - a.power[col]);
}

RawSequence render_sequence(const ArrayConfig& config, const FaultSpec& fault, const ThermalConstants& constants,
                            int h, int w, int n_frames, uint64_t seed, double kernel_width) {
    constants.validate();
    config.validate();
    fault.validate();
    if (h < 8 || w < 8) throw std::invalid_argument("render_sequence: grid must be at least 8x8");
    if (n_frames < 2) throw std::invalid_argument("render_sequence: need at least 2 frames");

    const ImageD field = synthesize_field<double>(config, fault, h, w, kernel_width);
    const ImageD delta = equilibrium_delta<double>(field, constants);

    RawSequence seq;
    seq.config = config;
    seq.fault = fault;
    seq.seed = seed;
    seq.frames.reserve(n_frames);

    Rng rng(seed);
    for (int t = 0; t < n_frames; ++t) {
        const double heat = 1.0 - std::exp(-static_cast<double>(t) / constants.tau);
        Image16 frame(h, w);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const double noise = constants.noise_sd > 0.0 ? constants.noise_sd * rng.normal() : 0.0;
                frame(r, c) = quantize(constants.ambient + delta(r, c) * heat + noise);
            }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

ArrayConfig sample_config(const std::vector<int>& gain_set, const std::vector<int>& phase_set, Rng& rng) {
    if (gain_set.empty() || phase_set.empty())
        throw std::invalid_argument("sample_config: empty value set");
    ArrayConfig c;
    for (int k = 0; k < 4; ++k) {
        c.elements[k].gain = gain_set[rng.uniform_index(gain_set.size())];
        c.elements[k].phase = phase_set[rng.uniform_index(phase_set.size())];
    }
    return c;
}

FaultSpec sample_fault(double db_min, double db_max, Rng& rng) {
    FaultSpec f;
    const int k = static_cast<int>(rng.uniform_index(4));
    f.attenuation_db[k] = rng.uniform(db_min, db_max);
    return f;
}

Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir) {
    if (spec.n_normal <= 0) throw std::invalid_argument("generate_dataset: n_normal must be positive");
    if (spec.n_anomalous < 0) throw std::invalid_argument("generate_dataset: n_anomalous must be non-negative");
    spec.constants.validate();

    std::error_code ec;
    std::filesystem::create_directories(out_dir / "raw", ec);
    if (ec) throw std::runtime_error("generate_dataset: cannot create " + (out_dir / "raw").string());

    Rng config_rng(derive_seed(spec.seed, 0x636f6e66));  // configuration stream
    Rng fault_rng(derive_seed(spec.seed, 0x66617574));   // fault stream

    Manifest manifest;
    manifest.reserve(spec.n_normal + spec.n_anomalous);

    std::vector<std::string> normal_ids;
    for (int i = 0; i < spec.n_normal; ++i) {
        std::ostringstream oss;
        oss << "seq_" << std::setw(4) << std::setfill('0') << i;
        normal_ids.push_back(oss.str());

        ManifestRecord rec;
        rec.id = normal_ids.back();
        rec.config = sample_config(spec.gain_set, spec.phase_set, config_rng);
        rec.label = Label::Normal;
        rec.seed = derive_seed(spec.seed, 1, static_cast<uint64_t>(i));
        rec.path = sequence_dir_name(rec.id);
        manifest.push_back(std::move(rec));
    }

    // Designate the normal test subset with the same pure split function the
    // dataset stage uses, so anomalous configurations mirror the test set.
    const auto assignment =
        data::split_ids(normal_ids, spec.split_seed, spec.train_ratio, spec.val_ratio, spec.test_ratio);
    std::vector<int> test_indices;
    for (int i = 0; i < spec.n_normal; ++i)
        if (assignment[i] == data::Split::Test) test_indices.push_back(i);

    if (spec.n_anomalous > 0 && test_indices.empty())
        throw std::invalid_argument("generate_dataset: no test-designated normals to mirror anomalies from");

    for (int i = 0; i < spec.n_anomalous; ++i) {
        const int src = test_indices[i % test_indices.size()];
        std::ostringstream oss;
        oss << "anom_" << std::setw(4) << std::setfill('0') << i;

        ManifestRecord rec;
        rec.id = oss.str();
        rec.config = manifest[src].config;
        rec.fault = sample_fault(spec.fault_db_min, spec.fault_db_max, fault_rng);
        rec.label = Label::Anomalous;
        rec.seed = derive_seed(spec.seed, 2, static_cast<uint64_t>(i));
        rec.path = sequence_dir_name(rec.id);
        manifest.push_back(std::move(rec));
    }

    for (const auto& rec : manifest) {
        const auto seq = render_sequence(rec.config, rec.fault, spec.constants, spec.height, spec.width,
                                         spec.n_frames, rec.seed, spec.kernel_width);
        const auto dir = out_dir / rec.path;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw std::runtime_error("generate_dataset: cannot create " + dir.string());
        for (size_t t = 0; t < seq.frames.size(); ++t) {
            std::ostringstream name;
            name << "frame_" << std::setw(4) << std::setfill('0') << t << ".tiff";
            io::write_tiff16(dir / name.str(), seq.frames[t]);
        }
    }

    io::write_manifest(out_dir / "raw" / "manifest.jsonl", manifest);
    return manifest;
}

}  // namespace thermadet::sim
