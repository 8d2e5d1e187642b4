#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace agf::cli {

/// Reproducibility record written next to every command's outputs.
class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed);

  nlohmann::json& config() { return config_; }
  void input(const std::filesystem::path& path);
  void output(const std::filesystem::path& path);

  /// Runs `fn` and records its wall-clock duration under `stage`.
  template <typename F>
  auto timed(const std::string& stage, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      Manifest& m;
      const std::string& stage;
      std::chrono::steady_clock::time_point t0;
      ~Record() { m.timing(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()); }
    } record{*this, stage, t0};
    return fn();
  }

  void write(const std::filesystem::path& path) const;

 private:
  void timing(const std::string& stage, double seconds);

  std::string command_;
  std::uint64_t seed_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json timings_ = nlohmann::json::object();
};

}  // namespace agf::cli
