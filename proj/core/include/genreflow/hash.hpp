#pragma once

#include <string>
#include <string_view>

namespace genreflow {

/// Lowercase hex SHA-256 digest; used to bind checkpoints to the exact
/// vocabulary or feature model they were trained with.
std::string sha256_hex(std::string_view bytes);

}  // namespace genreflow
