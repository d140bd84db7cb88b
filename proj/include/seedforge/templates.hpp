#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace seedforge {

// Versioned prompt templates. Each file starts with a header line
//   # seedforge-template <name> v<version>
// followed by the body; {{slot}} placeholders are filled by render().
class TemplateStore {
 public:
  static TemplateStore load_dir(const std::filesystem::path& dir);

  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& slots) const;

  int version(const std::string& name) const;
  bool contains(const std::string& name) const;

  // name -> version, recorded in run manifests.
  std::map<std::string, int> versions() const;

 private:
  struct Entry {
    int version = 0;
    std::string body;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace seedforge
