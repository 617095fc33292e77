#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace chromalign::cli {

using Json = nlohmann::ordered_json;

/// Lowercase hex SHA-256 of a file's bytes. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_bytes(std::string_view bytes);

/// Throws IoError unless `path` names a readable regular file.
void require_file(const std::filesystem::path& path, std::string_view role);

/// Writes `bytes` to `path`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Shortest round-trip decimal for a double ("nan"/"inf" kept as text).
std::string format_double(double value);

/// One report per command run. Lists inputs and outputs with their digests,
/// the seed and the full configuration, so it doubles as the run manifest.
/// Holds no timestamps: reruns with equal inputs give equal bytes.
class RunReport {
 public:
  RunReport(std::string command, std::filesystem::path out_dir, std::uint64_t seed);

  Json& config() { return config_; }
  Json& results() { return results_; }

  void add_input(std::string role, const std::filesystem::path& path);
  /// Writes `bytes` under the output directory and records the file.
  void add_output(const std::string& relative, std::string_view bytes);
  void warn(std::string message);
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Serialises the report to `<out>/<relative>` and returns its path.
  std::filesystem::path write(const std::string& relative) const;
  Json to_json() const;

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  std::uint64_t seed_;
  Json config_ = Json::object();
  Json results_ = Json::object();
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
  std::vector<std::string> warnings_;
};

}  // namespace chromalign::cli
