#include "moocscope/resources.hpp"

#include <utility>

#include "moocscope/error.hpp"

namespace moocscope {
namespace detail {
extern const std::pair<std::string_view, std::string_view> kEmbeddedFiles[];
extern const std::size_t kEmbeddedFileCount;
}  // namespace detail

std::string_view bundled_resource(std::string_view name) {
  for (std::size_t i = 0; i < detail::kEmbeddedFileCount; ++i) {
    if (detail::kEmbeddedFiles[i].first == name) {
      return detail::kEmbeddedFiles[i].second;
    }
  }
  throw Error("no bundled resource named '" + std::string(name) + "'");
}

std::vector<std::string> bundled_resource_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < detail::kEmbeddedFileCount; ++i)
    names.emplace_back(detail::kEmbeddedFiles[i].first);
  return names;
}

}  // namespace moocscope
