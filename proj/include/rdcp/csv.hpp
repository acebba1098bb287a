#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rdcp {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip text for a double; "nan"/"inf" for non-finite values.
inline std::string fmt_num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string fmt_num(std::uint64_t x) { return std::to_string(x); }
inline std::string fmt_num(int x) { return std::to_string(x); }

/// CSV file with '#'-prefixed metadata lines followed by a header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const Metadata& meta, const std::vector<std::string>& header) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path, std::ios::binary);
        if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
        for (const auto& [k, v] : meta) out_ << "# " << k << '=' << v << '\n';
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace rdcp
