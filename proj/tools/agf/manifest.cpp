#include "manifest.hpp"

#include <fstream>

#include "agf/agf.hpp"

namespace agf::cli {

Manifest::Manifest(std::string command, std::uint64_t seed) : command_(std::move(command)), seed_(seed) {}

void Manifest::input(const std::filesystem::path& path) {
  inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

void Manifest::output(const std::filesystem::path& path) {
  outputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

void Manifest::timing(const std::string& stage, double seconds) { timings_[stage] = seconds; }

void Manifest::write(const std::filesystem::path& path) const {
  nlohmann::json j{{"command", command_},
                   {"version", std::string(kVersion)},
                   {"seed", seed_},
                   {"config", config_},
                   {"inputs", inputs_},
                   {"outputs", outputs_},
                   {"timings_s", timings_}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

}  // namespace agf::cli
