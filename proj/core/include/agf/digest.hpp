#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace agf {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);
std::string hmac_sha256_hex(std::string_view key, std::string_view message);

}  // namespace agf
