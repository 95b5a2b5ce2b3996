#include "iol/run_manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>

#include "iol/error.hpp"

namespace iol {

namespace {

struct DigestContext {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  DigestContext() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx.get(), data, n) != 1) throw Error("sha256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) throw Error("sha256 final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 15]);
    }
    return out;
  }
};

std::string base_name(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  DigestContext d;
  d.update(data.data(), data.size());
  return d.hex();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  DigestContext d;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

void RunManifest::set(std::string key, std::string value) {
  auto it = std::find_if(settings_.begin(), settings_.end(), [&](const auto& kv) { return kv.first == key; });
  if (it != settings_.end()) it->second = std::move(value);
  else settings_.emplace_back(std::move(key), std::move(value));
}

void RunManifest::add_input(const std::string& path) { inputs_.emplace_back(base_name(path), sha256_file(path)); }

void RunManifest::add_output(const std::string& path) { outputs_.emplace_back(base_name(path), sha256_file(path)); }

std::string RunManifest::config_hash() const {
  auto sorted = settings_;
  std::sort(sorted.begin(), sorted.end());
  std::string canon = command_ + "\n";
  for (const auto& [k, v] : sorted) canon += k + "=" + v + "\n";
  return sha256_hex(canon);
}

void RunManifest::write(std::ostream& out) const {
  auto sorted = settings_;
  std::sort(sorted.begin(), sorted.end());
  out << "tool = iol\n";
  out << "tool_version = " << kToolVersion << '\n';
  out << "command = " << command_ << '\n';
  out << "config_hash = " << config_hash() << '\n';
  for (const auto& [k, v] : sorted) out << "config." << k << " = " << v << '\n';
  for (const auto& [name, digest] : inputs_) out << "input." << name << " = sha256:" << digest << '\n';
  for (const auto& [name, digest] : outputs_) out << "output." << name << " = sha256:" << digest << '\n';
}

void RunManifest::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write(out);
}

}  // namespace iol
