#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace moocscope {

/// Contents of a data file compiled into the library, addressed by its path
/// under data/ (e.g. "sentiment/valence.tsv"). Throws Error when absent.
std::string_view bundled_resource(std::string_view name);

std::vector<std::string> bundled_resource_names();

}  // namespace moocscope
