#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "diraclab/grid.hpp"

namespace diraclab {

using json = nlohmann::ordered_json;

// Flat binary array container, bit-exact across platforms:
//   magic "DLAB", u32 version = 1, u32 dtype (1 = f64, 2 = c128),
//   u32 ndim, u64 dims[ndim], then the row-major little-endian payload.
void write_array(const std::filesystem::path& path, const Mat& A);
void write_array(const std::filesystem::path& path, const RVec& v);
Mat read_array_complex(const std::filesystem::path& path);
RVec read_array_real(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace diraclab
