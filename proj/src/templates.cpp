#include "seedforge/templates.hpp"

#include <fstream>
#include <sstream>

#include "seedforge/errors.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

TemplateStore TemplateStore::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    raise(ErrorCode::io, "template directory missing: " + dir.string());
  }
  TemplateStore store;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::string header;
    std::getline(in, header);
    // "# seedforge-template <name> v<version>"
    std::istringstream hs(header);
    std::string hash, tag, name, ver;
    hs >> hash >> tag >> name >> ver;
    if (hash != "#" || tag != "seedforge-template" || name.empty() || ver.size() < 2 ||
        ver[0] != 'v') {
      raise(ErrorCode::parse, "bad template header in " + entry.path().string());
    }
    Entry e;
    e.version = std::stoi(ver.substr(1));
    std::ostringstream body;
    body << in.rdbuf();
    e.body = body.str();
    // skip the blank line conventionally following the header
    if (!e.body.empty() && e.body.front() == '\n') e.body.erase(0, 1);
    store.entries_[name] = std::move(e);
  }
  return store;
}

std::string TemplateStore::render(const std::string& name,
                                  const std::map<std::string, std::string>& slots) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) raise(ErrorCode::io, "unknown template: " + name);
  const std::string& body = it->second.body;
  std::string out;
  out.reserve(body.size());
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t open = body.find("{{", pos);
    if (open == std::string::npos) {
      out.append(body, pos, std::string::npos);
      break;
    }
    std::size_t close = body.find("}}", open + 2);
    if (close == std::string::npos) {
      out.append(body, pos, std::string::npos);
      break;
    }
    out.append(body, pos, open - pos);
    std::string slot = text::trim(body.substr(open + 2, close - open - 2));
    auto sit = slots.find(slot);
    if (sit == slots.end()) {
      raise(ErrorCode::invalid_argument,
            "template '" + name + "' slot '" + slot + "' not provided");
    }
    out += sit->second;
    pos = close + 2;
  }
  return out;
}

int TemplateStore::version(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) raise(ErrorCode::io, "unknown template: " + name);
  return it->second.version;
}

bool TemplateStore::contains(const std::string& name) const {
  return entries_.count(name) > 0;
}

std::map<std::string, int> TemplateStore::versions() const {
  std::map<std::string, int> out;
  for (const auto& [name, entry] : entries_) out[name] = entry.version;
  return out;
}

}  // namespace seedforge
