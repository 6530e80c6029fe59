#pragma once

#include <string>

namespace uplift {

// Reads a whole file; throws IoError when the file cannot be opened.
std::string read_text_file(const std::string& path);

// Writes via a temporary file in the same directory followed by a rename, so
// a crash never leaves a half-written report behind.
void write_text_file_atomic(const std::string& path, const std::string& content);

}  // namespace uplift
