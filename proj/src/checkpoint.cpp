#include "rcrl/checkpoint.hpp"

#include <cstdint>
#include <fstream>

#include "rcrl/mlp.hpp"

namespace rcrl {

namespace {
constexpr char kMagic[4] = {'R', 'C', 'C', 'K'};
constexpr uint32_t kVersion = 1;
}  // namespace

void CheckpointFile::add(const std::string& tag, std::string bytes) {
  if (tag.size() != 4) throw ConfigError("checkpoint tag must be 4 chars");
  sections_[tag] = std::move(bytes);
}

bool CheckpointFile::has(const std::string& tag) const { return sections_.count(tag) != 0; }

const std::string& CheckpointFile::get(const std::string& tag) const {
  const auto it = sections_.find(tag);
  if (it == sections_.end()) throw ConfigError("checkpoint missing section " + tag);
  return it->second;
}

void CheckpointFile::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open checkpoint for writing: " + path);
  f.write(kMagic, 4);
  const uint32_t version = kVersion;
  f.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const uint32_t count = static_cast<uint32_t>(sections_.size());
  f.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& [tag, bytes] : sections_) {
    f.write(tag.data(), 4);
    const uint64_t len = bytes.size();
    f.write(reinterpret_cast<const char*>(&len), sizeof(len));
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  if (!f) throw ConfigError("checkpoint write failed: " + path);
}

CheckpointFile CheckpointFile::read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open checkpoint: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::string(magic, 4) != std::string(kMagic, 4))
    throw ConfigError("not a checkpoint file: " + path);
  uint32_t version = 0, count = 0;
  f.read(reinterpret_cast<char*>(&version), sizeof(version));
  f.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!f || version != kVersion) throw ConfigError("unsupported checkpoint version");
  CheckpointFile ck;
  for (uint32_t i = 0; i < count; ++i) {
    char tag[4];
    uint64_t len = 0;
    f.read(tag, 4);
    f.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!f) throw ConfigError("truncated checkpoint: " + path);
    std::string bytes(len, '\0');
    f.read(bytes.data(), static_cast<std::streamsize>(len));
    if (!f) throw ConfigError("truncated checkpoint: " + path);
    ck.sections_[std::string(tag, 4)] = std::move(bytes);
  }
  return ck;
}

}  // namespace rcrl
