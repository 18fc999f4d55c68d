#ifndef BDT_MANIFEST_HPP
#define BDT_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>

namespace bdt {

inline constexpr const char* kToolVersion = "0.1.0";

/// Flat key=value record of a fully resolved run configuration, written next
/// to every output so a run can be replayed exactly.
class RunManifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, int value);

  std::string to_string() const;  // keys sorted, one key=value per line
  void write(const std::string& path) const;

 private:
  std::map<std::string, std::string> entries_;
};

/// FNV-1a 64-bit digest of a file's bytes, as fixed-width hex.
std::string file_digest(const std::string& path);

}  // namespace bdt

#endif  // BDT_MANIFEST_HPP
