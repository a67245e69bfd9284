#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "io.hpp"
#include "sieve.hpp"

#include <json.hpp>

namespace omega {

// ---------------------------------------------------------------------------
// OMGT binary counter format, version 1 (little-endian, packed):
//   "OMGT" | u32 version | u64 lo | u64 hi | f64 y | f64 z
// followed by (hi-lo) full counters and, when a window is present (y < z),
// another (hi-lo) windowed counters.  y = z = 0 encodes "no window".

namespace detail {

template <class T>
void put_raw(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T get_raw(const std::string& in, std::size_t& off) {
    if (off + sizeof(T) > in.size())
        throw std::runtime_error("omega cache: truncated file");
    T v;
    std::memcpy(&v, in.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

} // namespace detail

inline void save_omega_table(const OmegaTable& t, const std::string& path) {
    std::string out;
    const uint64_t n = t.hi - t.lo;
    out.reserve(24 + 16 + n * (t.window ? 2 : 1));
    out += "OMGT";
    detail::put_raw<uint32_t>(out, 1);
    detail::put_raw<uint64_t>(out, t.lo);
    detail::put_raw<uint64_t>(out, t.hi);
    detail::put_raw<double>(out, t.window ? t.window->y : 0.0);
    detail::put_raw<double>(out, t.window ? t.window->z : 0.0);
    out.append(reinterpret_cast<const char*>(t.full.data()), t.full.size());
    if (t.window)
        out.append(reinterpret_cast<const char*>(t.windowed.data()), t.windowed.size());
    write_text_file(path, out);
}

inline OmegaTable load_omega_table(const std::string& path) {
    const std::string in = read_text_file(path);
    if (in.size() < 36 || in.compare(0, 4, "OMGT") != 0)
        throw std::runtime_error("omega cache: bad magic in " + path);
    std::size_t off = 4;
    const auto version = detail::get_raw<uint32_t>(in, off);
    if (version != 1)
        throw std::runtime_error("omega cache: unsupported version in " + path);
    OmegaTable t;
    t.lo = detail::get_raw<uint64_t>(in, off);
    t.hi = detail::get_raw<uint64_t>(in, off);
    const auto y = detail::get_raw<double>(in, off);
    const auto z = detail::get_raw<double>(in, off);
    if (t.lo >= t.hi) throw std::runtime_error("omega cache: bad range in " + path);
    const uint64_t n = t.hi - t.lo;
    const bool has_window = y < z;
    if (in.size() - off != n * (has_window ? 2 : 1))
        throw std::runtime_error("omega cache: size mismatch in " + path);
    if (has_window) t.window = WindowBounds{y, z};
    t.full.assign(in.begin() + static_cast<std::ptrdiff_t>(off),
                  in.begin() + static_cast<std::ptrdiff_t>(off + n));
    if (has_window)
        t.windowed.assign(in.begin() + static_cast<std::ptrdiff_t>(off + n),
                          in.begin() + static_cast<std::ptrdiff_t>(off + 2 * n));
    return t;
}

// CSV export, header `n,omega,omega_window` (0 in the last column when the
// table holds no window).
inline void write_omega_csv(const OmegaTable& t, std::ostream& out) {
    out << "n,omega,omega_window\n";
    for (uint64_t n = t.lo; n < t.hi; ++n) {
        const unsigned wv = t.window ? t.windowed[n - t.lo] : 0u;
        out << n << ',' << unsigned(t.full[n - t.lo]) << ',' << wv << '\n';
    }
}

// ---------------------------------------------------------------------------
// per-segment checkpointing with a resume manifest

struct SieveManifest {
    uint64_t lo = 1;
    uint64_t hi = 1;
    uint64_t segment_size = 0;
    std::optional<WindowBounds> window;
    std::vector<uint64_t> completed;  // segment lower bounds, ascending

    std::size_t total_segments() const {
        return static_cast<std::size_t>((hi - lo + segment_size - 1) / segment_size);
    }
    bool complete() const { return completed.size() == total_segments(); }
};

inline std::string manifest_to_json(const SieveManifest& m) {
    SieveManifest sorted = m;
    std::sort(sorted.completed.begin(), sorted.completed.end());
    JsonObject j;
    const std::vector<uint64_t> range{sorted.lo, sorted.hi};
    j.field("range", std::span<const uint64_t>(range.data(), range.size()));
    j.field("segment_size", sorted.segment_size);
    j.field("window_y", sorted.window ? sorted.window->y : 0.0);
    j.field("window_z", sorted.window ? sorted.window->z : 0.0);
    j.field("completed",
            std::span<const uint64_t>(sorted.completed.data(), sorted.completed.size()));
    return j.str();
}

inline SieveManifest manifest_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SieveManifest m;
    m.lo = j.at("range").at(0).get<uint64_t>();
    m.hi = j.at("range").at(1).get<uint64_t>();
    m.segment_size = j.at("segment_size").get<uint64_t>();
    const auto y = j.at("window_y").get<double>();
    const auto z = j.at("window_z").get<double>();
    if (y < z) m.window = WindowBounds{y, z};
    for (const auto& v : j.at("completed")) m.completed.push_back(v.get<uint64_t>());
    std::sort(m.completed.begin(), m.completed.end());
    return m;
}

inline std::string manifest_path(const std::string& dir) { return dir + "/manifest.json"; }

inline std::string segment_path(const std::string& dir, uint64_t seg_lo) {
    return dir + "/seg_" + std::to_string(seg_lo) + ".omgt";
}

// Atomic-ish rewrite: write to a temp file, then rename over the target.
inline void write_manifest(const SieveManifest& m, const std::string& dir) {
    const std::string tmp = manifest_path(dir) + ".tmp";
    write_text_file(tmp, manifest_to_json(m));
    std::filesystem::rename(tmp, manifest_path(dir));
}

// Sieves [lo, hi) into per-segment OMGT files under `dir`, updating the
// manifest after every finished segment so an interrupted run resumes where
// it stopped.  An existing manifest must describe the same configuration.
inline SieveManifest sieve_with_checkpoints(uint64_t lo, uint64_t hi,
                                            std::optional<WindowBounds> window,
                                            const SieveOptions& opt,
                                            const std::string& dir) {
    validate_range(lo, hi, "sieve_with_checkpoints");
    validate_window(window, "sieve_with_checkpoints");
    std::filesystem::create_directories(dir);

    SieveManifest m;
    m.lo = lo;
    m.hi = hi;
    m.segment_size = std::max<uint64_t>(1, opt.segment_size);
    m.window = window;
    if (std::filesystem::exists(manifest_path(dir))) {
        const SieveManifest prev = manifest_from_json(read_text_file(manifest_path(dir)));
        const bool same_window = prev.window.has_value() == window.has_value() &&
                                 (!window || (prev.window->y == window->y &&
                                              prev.window->z == window->z));
        if (prev.lo != lo || prev.hi != hi || prev.segment_size != m.segment_size ||
            !same_window)
            throw std::invalid_argument(
                "sieve_with_checkpoints: cache dir holds a different configuration");
        m.completed = prev.completed;
    }

    std::vector<uint64_t> pending;
    for (uint64_t seg_lo = lo; seg_lo < hi; seg_lo += m.segment_size)
        if (!std::binary_search(m.completed.begin(), m.completed.end(), seg_lo) ||
            !std::filesystem::exists(segment_path(dir, seg_lo)))
            pending.push_back(seg_lo);
    // a manifest entry without its file (crash between write and rename)
    // falls back into pending; drop such entries before re-running
    std::erase_if(m.completed, [&](uint64_t s) {
        return std::find(pending.begin(), pending.end(), s) != pending.end();
    });

    if (!pending.empty()) {
        const BasePrimes base = make_base_primes(hi, window);
        const int threads = resolve_threads(opt.threads);
        std::vector<std::vector<uint64_t>> rem(static_cast<std::size_t>(threads));
        std::mutex manifest_mutex;
        parallel_for(pending.size(), threads, [&](std::size_t i, int worker) {
            const uint64_t seg_lo = pending[i];
            const uint64_t seg_hi = std::min(hi, seg_lo + m.segment_size);
            const uint64_t len = seg_hi - seg_lo;
            OmegaTable t;
            t.lo = seg_lo;
            t.hi = seg_hi;
            t.window = window;
            t.full.resize(len);
            if (window) t.windowed.resize(len);
            auto& scratch = rem[static_cast<std::size_t>(worker)];
            scratch.resize(len);
            sieve_segment(seg_lo, seg_hi, base, window, t.full.data(),
                          window ? t.windowed.data() : nullptr, scratch.data());
            save_omega_table(t, segment_path(dir, seg_lo));
            std::lock_guard<std::mutex> lock(manifest_mutex);
            m.completed.push_back(seg_lo);
            write_manifest(m, dir);
        });
    } else {
        write_manifest(m, dir);
    }
    std::sort(m.completed.begin(), m.completed.end());
    return m;
}

// Reassembles one contiguous table from a completed checkpoint directory.
inline OmegaTable assemble_cached_table(const std::string& dir) {
    const SieveManifest m = manifest_from_json(read_text_file(manifest_path(dir)));
    if (!m.complete())
        throw std::runtime_error("assemble_cached_table: cache incomplete; resume first");
    OmegaTable t;
    t.lo = m.lo;
    t.hi = m.hi;
    t.window = m.window;
    t.full.resize(m.hi - m.lo);
    if (m.window) t.windowed.resize(m.hi - m.lo);
    for (uint64_t seg_lo : m.completed) {
        const OmegaTable seg = load_omega_table(segment_path(dir, seg_lo));
        const bool same_window = seg.window.has_value() == m.window.has_value() &&
                                 (!m.window || (seg.window->y == m.window->y &&
                                                seg.window->z == m.window->z));
        if (seg.lo != seg_lo || seg.hi > m.hi || !same_window)
            throw std::runtime_error("assemble_cached_table: segment/manifest mismatch");
        std::copy(seg.full.begin(), seg.full.end(),
                  t.full.begin() + static_cast<std::ptrdiff_t>(seg.lo - m.lo));
        if (m.window)
            std::copy(seg.windowed.begin(), seg.windowed.end(),
                      t.windowed.begin() + static_cast<std::ptrdiff_t>(seg.lo - m.lo));
    }
    return t;
}

} // namespace omega
