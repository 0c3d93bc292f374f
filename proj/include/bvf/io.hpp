#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace bvf {

/// Fixed shortest-roundtrip rendering so reports are bit-stable across runs.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes via a temp file and rename so readers never see partial output.
inline void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

struct CsvWriter {
    std::string buffer;

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) buffer += (i ? "," : "") + cols[i];
        buffer += '\n';
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) buffer += (i ? "," : "") + fmt_double(vals[i]);
        buffer += '\n';
    }
};

}  // namespace bvf
