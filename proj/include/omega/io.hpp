#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace omega {

// All numeric output goes through one formatter: 12 significant digits,
// shortest-form %g, so identical runs emit identical bytes.
inline std::string format_sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string format_u64(uint64_t v) { return std::to_string(v); }

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

// Flat JSON object writer preserving insertion order; numbers formatted via
// format_sig12/format_u64 so emitted files are byte-stable.
class JsonObject {
public:
    JsonObject& field(const std::string& k, double v) { return raw(k, format_sig12(v)); }
    JsonObject& field(const std::string& k, uint64_t v) { return raw(k, format_u64(v)); }
    JsonObject& field(const std::string& k, int v) { return raw(k, std::to_string(v)); }
    JsonObject& field(const std::string& k, bool v) { return raw(k, v ? "true" : "false"); }
    JsonObject& field(const std::string& k, const std::string& v) {
        return raw(k, "\"" + json_escape(v) + "\"");
    }
    JsonObject& field(const std::string& k, std::span<const double> v) {
        std::string arr = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) arr += ",";
            arr += format_sig12(v[i]);
        }
        return raw(k, arr + "]");
    }
    JsonObject& field(const std::string& k, std::span<const uint64_t> v) {
        std::string arr = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) arr += ",";
            arr += format_u64(v[i]);
        }
        return raw(k, arr + "]");
    }

    std::string str() const { return "{" + body_ + "}\n"; }

private:
    JsonObject& raw(const std::string& k, const std::string& v) {
        if (!body_.empty()) body_ += ",";
        body_ += "\"" + json_escape(k) + "\":" + v;
        return *this;
    }
    std::string body_;
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

// CSV dialect: comma separator, LF line ends, numeric-only cells (no quoting).
class CsvWriter {
public:
    explicit CsvWriter(const std::string& header) { buf_ = header + "\n"; }
    void row(std::span<const std::string> cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) buf_ += ",";
            buf_ += cells[i];
        }
        buf_ += "\n";
    }
    const std::string& str() const { return buf_; }

private:
    std::string buf_;
};

} // namespace omega
