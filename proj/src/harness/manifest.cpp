#include "voltmarket/harness/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace voltmarket::harness {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path root) : root_(std::move(root)) {}

void ArtifactWriter::write_text(const std::string& relative, std::string_view content) {
  if (std::find(produced_.begin(), produced_.end(), relative) != produced_.end()) {
    throw std::logic_error("artifact written twice: " + relative);
  }
  const std::filesystem::path path = root_ / relative;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
  produced_.push_back(relative);
  entries_.push_back({relative, sha256_hex(content), content.size()});
}

void ArtifactWriter::write_json(const std::string& relative, const nlohmann::json& doc) {
  write_text(relative, doc.dump(2) + "\n");
}

void ArtifactWriter::write_manifest(std::string_view subcommand) {
  auto sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) { return a.path < b.path; });
  nlohmann::json files = nlohmann::json::array();
  for (const auto& e : sorted) files.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  const nlohmann::json doc{{"subcommand", subcommand}, {"files", files}};
  const std::string text = doc.dump(2) + "\n";
  std::filesystem::create_directories(root_);
  std::ofstream out(root_ / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest.json");
  out << text;
}

}  // namespace voltmarket::harness
