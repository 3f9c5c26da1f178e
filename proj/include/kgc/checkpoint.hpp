#pragma once

#include <filesystem>

#include "kgc/scorer.hpp"

namespace kgc {

// Layout (little-endian): 8-byte magic "KGCCKPT1", u32 model kind, u64 |E|,
// u64 |R|, u64 K, then the entity matrix and the relation matrix as row-major
// f64 values.
inline constexpr char kCheckpointMagic[8] = {'K', 'G', 'C', 'C', 'K', 'P', 'T', '1'};

void save_checkpoint(const Store& store, const std::filesystem::path& file);

/// Throws DataError on a bad magic, unknown model kind, or truncated payload.
Store load_checkpoint(const std::filesystem::path& file);

}  // namespace kgc
