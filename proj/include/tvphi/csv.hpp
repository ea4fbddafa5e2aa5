#pragma once

// Small CSV/file helpers. Files are written to a temporary name and
// renamed into place, so an interrupted run never leaves a truncated file.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace tvphi {

inline void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}

}  // namespace tvphi
