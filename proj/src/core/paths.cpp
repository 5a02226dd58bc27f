#include "kumpul/core/paths.hpp"

#include <cstdlib>

#ifndef KUMPUL_DEFAULT_DATA_DIR
#define KUMPUL_DEFAULT_DATA_DIR "data"
#endif

namespace kumpul {

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("KUMPUL_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return KUMPUL_DEFAULT_DATA_DIR;
}

} // namespace kumpul
