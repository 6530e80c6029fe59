#include "uplift/fsio.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uplift/errors.hpp"

namespace uplift {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_error(ErrorCode::IoError, "cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw_error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw_error(ErrorCode::IoError, "write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw_error(ErrorCode::IoError,
                    "rename " + tmp.string() + " -> " + target.string() + " failed: " + ec.message());
    }
}

}  // namespace uplift
