#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace klocsim {

// Grouping key for a kernel-level object context: one file inode or one socket.
struct KlocKey {
  enum class Type : std::uint8_t { kFile = 0, kSocket = 1 };

  Type type = Type::kFile;
  std::uint64_t id = 0;

  static KlocKey file(std::uint64_t id) { return {Type::kFile, id}; }
  static KlocKey socket(std::uint64_t id) { return {Type::kSocket, id}; }

  bool is_file() const { return type == Type::kFile; }

  friend bool operator==(const KlocKey&, const KlocKey&) = default;
  friend auto operator<=>(const KlocKey&, const KlocKey&) = default;

  std::string str() const {
    return (is_file() ? "file:" : "sock:") + std::to_string(id);
  }
};

}  // namespace klocsim

template <>
struct std::hash<klocsim::KlocKey> {
  std::size_t operator()(const klocsim::KlocKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.id * 2 + static_cast<std::uint64_t>(k.type));
  }
};
