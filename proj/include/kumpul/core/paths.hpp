#pragma once

#include <filesystem>

namespace kumpul {

/// Bundled data (seed corpora, language profiles, lexicons): $KUMPUL_DATA_DIR
/// when set, otherwise the directory recorded at build time.
std::filesystem::path data_dir();

} // namespace kumpul
