#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace voltmarket::harness {

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Single writer for every file a run produces. Files are recorded as they
/// are written; `write_manifest` emits manifest.json last, listing each file
/// with its size and content hash, sorted by relative path.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path root);

  void write_text(const std::string& relative, std::string_view content);
  void write_json(const std::string& relative, const nlohmann::json& doc);
  void write_manifest(std::string_view subcommand);

  const std::filesystem::path& root() const { return root_; }
  const std::vector<std::string>& produced() const { return produced_; }

 private:
  struct Entry {
    std::string path;
    std::string sha256;
    std::size_t bytes;
  };

  std::filesystem::path root_;
  std::vector<std::string> produced_;
  std::vector<Entry> entries_;
};

}  // namespace voltmarket::harness
