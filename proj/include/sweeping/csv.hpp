#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sweeping/errors.hpp"

namespace sweeping {

/// Shortest decimal representation that round-trips the double exactly;
/// byte-identical reruns depend on this formatting.
inline std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_number(std::size_t v) { return std::to_string(v); }
inline std::string format_number(int v) { return std::to_string(v); }

/// Minimal CSV accumulator: header once, numeric rows, LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) body_ += ',';
            body_ += columns_[i];
        }
        body_ += '\n';
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_.size())
            throw ConfigError("CsvWriter: row width does not match the header");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) body_ += ',';
            body_ += format_number(values[i]);
        }
        body_ += '\n';
    }

    const std::string& str() const { return body_; }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path.string());
        out << body_;
        if (!out) throw IoError("write failed: " + path.string());
    }

private:
    std::vector<std::string> columns_;
    std::string body_;
};

} // namespace sweeping
