#pragma once

#include <map>
#include <string>

namespace rcrl {

// Tagged-section binary container. Sections are 4-char tags mapping to
// opaque byte blobs; unknown sections are preserved, known ones are pulled
// out by the training code. Layout: magic "RCCK", u32 version, u32 count,
// then per section tag[4] + u64 length + bytes.
class CheckpointFile {
 public:
  void add(const std::string& tag, std::string bytes);
  bool has(const std::string& tag) const;
  const std::string& get(const std::string& tag) const;  // throws when absent

  void write(const std::string& path) const;
  static CheckpointFile read(const std::string& path);

 private:
  std::map<std::string, std::string> sections_;
};

}  // namespace rcrl
