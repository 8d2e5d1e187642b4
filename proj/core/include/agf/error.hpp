#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace agf {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that does not follow the declared record schema (missing column, bad header).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration: unreadable stage map, invalid parameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An IDS signature that matched no stage-map rule and no fallback is configured.
class UnknownSignatureError : public Error {
 public:
  explicit UnknownSignatureError(std::string signature)
      : Error("no stage-map rule for signature '" + signature + "'"),
        signature_(std::move(signature)) {}

  const std::string& signature() const noexcept { return signature_; }

 private:
  std::string signature_;
};

/// A model that violates one or more automaton invariants. Carries every violation found.
class ModelValidationError : public Error {
 public:
  explicit ModelValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "model validation failed:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace agf
