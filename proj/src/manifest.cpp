#include "bdt/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bdt {

void RunManifest::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

void RunManifest::set(const std::string& key, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  entries_[key] = buf;
}

void RunManifest::set(const std::string& key, long long value) {
  entries_[key] = std::to_string(value);
}

void RunManifest::set(const std::string& key, std::uint64_t value) {
  entries_[key] = std::to_string(value);
}

void RunManifest::set(const std::string& key, int value) {
  entries_[key] = std::to_string(value);
}

std::string RunManifest::to_string() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += key;
    out += "=";
    out += value;
    out += "\n";
  }
  return out;
}

void RunManifest::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write manifest: " + path);
  os << to_string();
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for digest: " + path);
  std::uint64_t hash = 1469598103934665603ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
  return out;
}

}  // namespace bdt
