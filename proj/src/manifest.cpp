#include "thermadet/manifest.hpp"

#include <json.hpp>

#include <fstream>

namespace thermadet::io {

using nlohmann::json;

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("manifest: cannot open for writing: " + path.string());
    for (const auto& rec : m) {
        json j;
        j["id"] = rec.id;
        auto cfg = json::array();
        for (const auto& e : rec.config.elements) cfg.push_back(json::array({e.gain, e.phase}));
        j["config"] = cfg;
        j["fault"] = rec.fault.attenuation_db;
        j["label"] = label_name(rec.label);
        j["seed"] = rec.seed;
        j["path"] = rec.path;
        f << j.dump() << "\n";
    }
    if (!f) throw std::runtime_error("manifest: write failed: " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("manifest: cannot open: " + path.string());
    Manifest m;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        ManifestRecord rec;
        rec.id = j.at("id").get<std::string>();
        const auto& cfg = j.at("config");
        if (cfg.size() != 4) throw std::runtime_error("manifest: config must have 4 elements");
        for (int k = 0; k < 4; ++k) {
            rec.config.elements[k].gain = cfg[k][0].get<int>();
            rec.config.elements[k].phase = cfg[k][1].get<int>();
        }
        const auto& fault = j.at("fault");
        for (int k = 0; k < 4; ++k) rec.fault.attenuation_db[k] = fault[k].get<double>();
        rec.label = label_from_name(j.at("label").get<std::string>());
        rec.seed = j.at("seed").get<uint64_t>();
        rec.path = j.at("path").get<std::string>();
        m.push_back(std::move(rec));
    }
    return m;
}

}  // namespace thermadet::io
