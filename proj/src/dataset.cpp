#include "thermadet/dataset.hpp"

#include "thermadet/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstring>
#include <fstream>

namespace thermadet::data {

ProcessedSequence preprocess(const RawSequence& raw) {
    if (raw.frames.size() < 2) throw std::invalid_argument("preprocess: need at least 2 frames");

    const auto& background = raw.frames[0];
    ProcessedSequence out;
    out.config = raw.config;
    out.label = raw.fault.anomalous() ? Label::Anomalous : Label::Normal;
    out.id = raw.id;
    out.frames.reserve(raw.frames.size() - 1);

    float max_value = 0.0f;
    for (size_t t = 1; t < raw.frames.size(); ++t) {
        const auto& f = raw.frames[t];
        if (f.rows() != background.rows() || f.cols() != background.cols())
            throw std::invalid_argument("preprocess: inconsistent frame shapes");
        ImageF diff = (f.cast<float>() - background.cast<float>()).cwiseMax(0.0f);
        max_value = std::max(max_value, diff.maxCoeff());
        out.frames.push_back(std::move(diff));
    }
    if (max_value > 0.0f)
        for (auto& f : out.frames) f /= max_value;
    return out;
}

std::vector<int> window_starts(int n_frames, const WindowSpec& spec) {
    if (spec.length < 1 || spec.offset < 1) throw std::invalid_argument("window_starts: length and offset must be >= 1");
    if (spec.length > n_frames)
        throw std::invalid_argument("window_starts: window length " + std::to_string(spec.length) +
                                    " exceeds sequence length " + std::to_string(n_frames));
    std::vector<int> starts;
    for (int s = 0; s + spec.length <= n_frames; s += spec.offset) starts.push_back(s);
    return starts;
}

std::vector<Split> split_ids(std::vector<std::string> ids, uint64_t seed, double train_ratio, double val_ratio,
                             double test_ratio) {
    const double total = train_ratio + val_ratio + test_ratio;
    if (!(total > 0.0)) throw std::invalid_argument("split: ratios must sum to a positive value");
    const auto n = static_cast<int>(ids.size());
    if (n < 10) throw std::invalid_argument("split: need at least 10 normal sequences");

    // Shuffle a deterministic ordering of the id set, then cut. Rounded val
    // and test counts keep each bucket within one sequence of its ratio.
    std::vector<int> shuffled(n);
    for (int i = 0; i < n; ++i) shuffled[i] = i;
    std::sort(shuffled.begin(), shuffled.end(), [&](int a, int b) { return ids[a] < ids[b]; });
    Rng rng(derive_seed(seed, 0x73706c69));
    rng.shuffle(shuffled.begin(), shuffled.end());

    const int n_val = static_cast<int>(std::lround(val_ratio / total * n));
    const int n_test = static_cast<int>(std::lround(test_ratio / total * n));

    std::vector<Split> result(n, Split::Train);
    for (int i = 0; i < n_val; ++i) result[shuffled[i]] = Split::Val;
    for (int i = n_val; i < n_val + n_test; ++i) result[shuffled[i]] = Split::Test;
    return result;
}

SplitAssignment split(const Manifest& manifest, uint64_t seed, double train_ratio, double val_ratio,
                      double test_ratio) {
    std::vector<std::string> normal_ids;
    std::vector<std::string> anomalous_ids;
    for (const auto& rec : manifest)
        (rec.label == Label::Normal ? normal_ids : anomalous_ids).push_back(rec.id);

    const auto assignment = split_ids(normal_ids, seed, train_ratio, val_ratio, test_ratio);
    SplitAssignment out;
    for (size_t i = 0; i < normal_ids.size(); ++i) out[normal_ids[i]] = assignment[i];
    for (const auto& id : anomalous_ids) out[id] = Split::Test;
    return out;
}

void write_split(const std::filesystem::path& path, const SplitAssignment& a) {
    nlohmann::json j;
    for (const auto& [id, s] : a) j[id] = split_name(s);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("split: cannot open for writing: " + path.string());
    f << j.dump(2) << "\n";
}

SplitAssignment read_split(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("split: cannot open: " + path.string());
    nlohmann::json j;
    f >> j;
    SplitAssignment a;
    for (auto& [id, s] : j.items()) {
        const auto name = s.get<std::string>();
        if (name == "train")
            a[id] = Split::Train;
        else if (name == "val")
            a[id] = Split::Val;
        else if (name == "test")
            a[id] = Split::Test;
        else
            throw std::runtime_error("split: unknown split name: " + name);
    }
    return a;
}

namespace {

constexpr char kMagic[8] = {'T', 'H', 'E', 'R', 'M', 'S', 'E', 'Q'};
constexpr uint32_t kVersion = 1;
constexpr uint8_t kNormPerSequenceMax = 1;

template <typename T>
void write_pod(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw std::runtime_error("processed container: truncated file");
    return v;
}

}  // namespace

void store_processed(const std::filesystem::path& path, const ProcessedSequence& seq) {
    if (seq.frames.empty()) throw std::invalid_argument("store_processed: empty frame list");
    const auto h = static_cast<uint32_t>(seq.frames[0].rows());
    const auto w = static_cast<uint32_t>(seq.frames[0].cols());
    for (const auto& f : seq.frames)
        if (static_cast<uint32_t>(f.rows()) != h || static_cast<uint32_t>(f.cols()) != w)
            throw std::invalid_argument("store_processed: inconsistent frame shapes");

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("store_processed: cannot open " + path.string());
    f.write(kMagic, sizeof(kMagic));
    write_pod(f, kVersion);
    write_pod(f, kNormPerSequenceMax);
    write_pod(f, static_cast<uint8_t>(seq.label == Label::Anomalous ? 1 : 0));
    write_pod(f, static_cast<uint16_t>(0));
    write_pod(f, h);
    write_pod(f, w);
    write_pod(f, static_cast<uint32_t>(seq.frames.size()));
    write_pod(f, static_cast<uint32_t>(seq.id.size()));
    f.write(seq.id.data(), static_cast<std::streamsize>(seq.id.size()));
    for (const auto& e : seq.config.elements) {
        write_pod(f, static_cast<int32_t>(e.gain));
        write_pod(f, static_cast<int32_t>(e.phase));
    }
    for (const auto& frame : seq.frames)
        for (uint32_t r = 0; r < h; ++r)
            for (uint32_t c = 0; c < w; ++c) write_pod(f, frame(r, c));
    if (!f) throw std::runtime_error("store_processed: write failed: " + path.string());
}

ProcessedSequence load_processed(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_processed: cannot open " + path.string());

    char magic[8];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_processed: corrupt container (bad magic): " + path.string());
    const auto version = read_pod<uint32_t>(f);
    if (version != kVersion)
        throw std::runtime_error("load_processed: unsupported container version " + std::to_string(version));
    const auto norm_mode = read_pod<uint8_t>(f);
    if (norm_mode != kNormPerSequenceMax)
        throw std::runtime_error("load_processed: unknown normalization mode " + std::to_string(norm_mode));

    ProcessedSequence seq;
    seq.label = read_pod<uint8_t>(f) ? Label::Anomalous : Label::Normal;
    read_pod<uint16_t>(f);  // reserved
    const auto h = read_pod<uint32_t>(f);
    const auto w = read_pod<uint32_t>(f);
    const auto t = read_pod<uint32_t>(f);
    const auto id_len = read_pod<uint32_t>(f);
    seq.id.resize(id_len);
    f.read(seq.id.data(), id_len);
    if (!f) throw std::runtime_error("load_processed: truncated file");
    for (auto& e : seq.config.elements) {
        e.gain = read_pod<int32_t>(f);
        e.phase = read_pod<int32_t>(f);
    }
    seq.frames.reserve(t);
    for (uint32_t i = 0; i < t; ++i) {
        ImageF frame(h, w);
        for (uint32_t r = 0; r < h; ++r)
            for (uint32_t c = 0; c < w; ++c) frame(r, c) = read_pod<float>(f);
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

}  // namespace thermadet::data
