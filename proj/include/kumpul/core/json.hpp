#pragma once

#include <json.hpp>

namespace kumpul {

/// Insertion-ordered JSON so that serialized documents are byte-stable.
using Json = nlohmann::ordered_json;

} // namespace kumpul
