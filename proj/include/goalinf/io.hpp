#pragma once

#include <string>

namespace goalinf::io {

// Throws SchemaError when the file cannot be read.
std::string read_file(const std::string& path);

// Writes through a temporary file in the same directory and renames it into
// place; creates missing parent directories. Throws std::runtime_error.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string sha256_hex(const std::string& data);

}  // namespace goalinf::io
