#ifndef MRRHOM_CHECKSUM_HPP
#define MRRHOM_CHECKSUM_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace mrrhom
{

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

} // namespace mrrhom

#endif // MRRHOM_CHECKSUM_HPP
