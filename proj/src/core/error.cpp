#include "kumpul/core/error.hpp"

namespace kumpul {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::storage: return "storage";
    case ErrorCode::unavailable: return "unavailable";
    case ErrorCode::protocol: return "protocol";
    case ErrorCode::internal: return "internal";
    }
    return "internal";
}

} // namespace kumpul
