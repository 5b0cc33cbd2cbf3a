#pragma once

#include <cstdint>
#include <filesystem>

#include "num.hpp"

namespace embedkit::data {

// FVEC blob: magic "FVEC" | u32 count | u32 dim | u32 reserved=0 |
// count*dim float32, everything little-endian. Values are widened to 64-bit
// reals on load; any non-finite entry is rejected with its byte offset.
num::Matrix load_blob(const std::filesystem::path& path);

// Values are narrowed to float32 on write.
void save_blob(const std::filesystem::path& path, const num::Matrix& values);

}  // namespace embedkit::data
