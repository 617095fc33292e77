#include "manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include <Eigen/Core>
#include <openssl/evp.h>

#include "chromalign/error.hpp"
#include "chromalign/version.hpp"

namespace chromalign::cli {

std::string sha256_bytes(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &size, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < size; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return sha256_bytes(bytes);
}

void require_file(const std::filesystem::path& path, std::string_view role) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError(std::string(role) + " file not found: " + path.string());
  }
  std::ifstream in(path);
  if (!in) throw IoError(std::string(role) + " file is not readable: " + path.string());
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

RunReport::RunReport(std::string command, std::filesystem::path out_dir, std::uint64_t seed)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), seed_(seed) {}

void RunReport::add_input(std::string role, const std::filesystem::path& path) {
  inputs_.push_back({{"role", std::move(role)}, {"path", path.generic_string()}, {"sha256", sha256_file(path)}});
}

void RunReport::add_output(const std::string& relative, std::string_view bytes) {
  write_file(out_dir_ / relative, bytes);
  outputs_.push_back({{"path", relative}, {"sha256", sha256_bytes(bytes)}});
}

void RunReport::warn(std::string message) { warnings_.push_back(std::move(message)); }

Json RunReport::to_json() const {
  Json j;
  j["command"] = command_;
  j["versions"] = {
      {"chromalign", kVersion},
      {"report_format", 1},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
  };
  j["seed"] = seed_;
  j["config"] = config_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  j["warnings"] = warnings_;
  j["results"] = results_;
  return j;
}

std::filesystem::path RunReport::write(const std::string& relative) const {
  const auto path = out_dir_ / relative;
  write_file(path, to_json().dump(2) + "\n");
  return path;
}

}  // namespace chromalign::cli
