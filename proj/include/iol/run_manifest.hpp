#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iol {

inline constexpr const char* kToolVersion = "1.0.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

// Small `key = value` record of one subcommand run. Files are recorded by
// base name and digest only, so two runs over identical inputs with identical
// settings produce identical manifests regardless of directory.
class RunManifest {
 public:
  explicit RunManifest(std::string command) : command_(std::move(command)) {}

  void set(std::string key, std::string value);
  void add_input(const std::string& path);
  void add_output(const std::string& path);

  // Digest of the sorted settings.
  std::string config_hash() const;
  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> settings_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

}  // namespace iol
