// SPDX-License-Identifier: Apache-2.0
#include "ptv/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "ptv/digest.hpp"

using nlohmann::json;

namespace ptv::train {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'P', 'T', 'V', 'C', 'K', 'P', 'T', '1'};

struct Section {
    std::string name;
    std::vector<double> values;
};

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_blob(const std::string& path, const std::vector<Section>& sections) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open for write: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, static_cast<std::uint32_t>(sections.size()));
    for (const Section& s : sections) {
        write_u32(out, static_cast<std::uint32_t>(s.name.size()));
        out.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
        write_u64(out, s.values.size());
        out.write(reinterpret_cast<const char*>(s.values.data()),
                  static_cast<std::streamsize>(s.values.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

std::vector<Section> read_blob(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtimeerror_hint(path);  // placeholder
}

}  // namespace

}  // namespace ptv::train
