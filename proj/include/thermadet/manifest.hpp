#pragma once

#include "thermadet/types.hpp"

#include <filesystem>
#include <vector>

namespace thermadet {

// One line of the dataset manifest (JSON lines, one record per sequence).
struct ManifestRecord {
    std::string id;
    ArrayConfig config;
    FaultSpec fault;
    Label label = Label::Normal;
    uint64_t seed = 0;
    std::string path;  // sequence directory, relative to the manifest
};

using Manifest = std::vector<ManifestRecord>;

namespace io {

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace io
}  // namespace thermadet
