#pragma once

// On-disk formats: 16-bit millimetre PGM depth with a JSON sidecar, 8-bit
// glass masks, JSON configs and scenes, per-frame diagnostics lines, and the
// corpus manifest.

#include "specklemap/core.hpp"
#include "specklemap/pipeline.hpp"
#include "specklemap/synth.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace specklemap {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------- files

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

/// Writes to a sibling temp file, then renames over the target.
inline void atomic_write(const fs::path& path, std::string_view bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << v;
    return ss.str();
}

inline std::string file_hash(const fs::path& path) { return hex64(fnv1a(read_file(path))); }

// ---------------------------------------------------------------- PGM

struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t data_offset = 0;        // byte offset of the raster
    std::vector<std::uint16_t> pixels;  // row-major
};

namespace detail {

class PgmReader {
public:
    explicit PgmReader(std::string_view bytes) : b_(bytes) {}

    PgmImage parse() {
        if (b_.size() < 2 || b_[0] != 'P' || b_[1] != '5') throw ParseError("PGM: expected magic P5", 0);
        pos_ = 2;
        PgmImage img;
        img.width = header_int("width");
        img.height = header_int("height");
        img.maxval = header_int("maxval");
        if (img.width < 1 || img.height < 1) throw ParseError("PGM: dimensions must be positive", pos_);
        if (img.maxval < 1 || img.maxval > 65535) throw ParseError("PGM: maxval must be in [1, 65535]", pos_);
        if (pos_ >= b_.size() || !is_space(b_[pos_])) throw ParseError("PGM: expected whitespace after maxval", pos_);
        ++pos_;
        img.data_offset = pos_;
        const std::size_t bpp = img.maxval > 255 ? 2 : 1;
        const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
        if (b_.size() - pos_ < n * bpp) throw ParseError("PGM: truncated raster", b_.size());
        img.pixels.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t at = pos_ + i * bpp;
            const auto hi = static_cast<unsigned char>(b_[at]);
            img.pixels[i] = bpp == 2 ? static_cast<std::uint16_t>((hi << 8) | static_cast<unsigned char>(b_[at + 1])) : hi;
            if (img.pixels[i] > img.maxval) throw ParseError("PGM: sample exceeds maxval", at);
        }
        return img;
    }

private:
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

    void skip_space_and_comments() {
        while (pos_ < b_.size()) {
            if (is_space(b_[pos_])) {
                ++pos_;
            } else if (b_[pos_] == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n' && b_[pos_] != '\r') ++pos_;
            } else {
                break;
            }
        }
    }

    int header_int(const char* what) {
        const std::size_t before = pos_;
        skip_space_and_comments();
        if (pos_ == before) throw ParseError(std::string("PGM: expected whitespace before ") + what, pos_);
        if (pos_ >= b_.size() || b_[pos_] < '0' || b_[pos_] > '9')
            throw ParseError(std::string("PGM: expected ") + what, pos_);
        long long v = 0;
        while (pos_ < b_.size() && b_[pos_] >= '0' && b_[pos_] <= '9') {
            v = v * 10 + (b_[pos_] - '0');
            if (v > 1'000'000'000) throw ParseError(std::string("PGM: ") + what + " too large", pos_);
            ++pos_;
        }
        return static_cast<int>(v);
    }

    std::string_view b_;
    std::size_t pos_ = 0;
};

inline std::string pgm_header(int w, int h, int maxval) {
    return "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n" + std::to_string(maxval) + "\n";
}

}  // namespace detail

inline PgmImage parse_pgm(std::string_view bytes) { return detail::PgmReader(bytes).parse(); }

/// Depth in metres -> P5, maxval 65535, big-endian millimetres, 0 = invalid.
inline std::string encode_depth_pgm(const Grid<double>& depth) {
    std::string out = detail::pgm_header(depth.width(), depth.height(), 65535);
    out.reserve(out.size() + depth.size() * 2);
    for (int v = 0; v < depth.height(); ++v)
        for (int u = 0; u < depth.width(); ++u) {
            const double d = depth(u, v);
            long long mm = 0;
            if (std::isfinite(d) && d > 0.0) {
                mm = std::llround(d * 1000.0);
                if (mm > 65535)
                    throw RangeError("depth " + std::to_string(d) + " m at (" + std::to_string(u) + ", " +
                                     std::to_string(v) + ") exceeds 65.535 m");
            }
            out.push_back(static_cast<char>((mm >> 8) & 0xff));
            out.push_back(static_cast<char>(mm & 0xff));
        }
    return out;
}

inline Grid<double> decode_depth_pgm(std::string_view bytes) {
    const PgmImage img = parse_pgm(bytes);
    if (img.maxval != 65535) throw ParseError("depth PGM: maxval must be 65535", 0);
    Grid<double> g(img.width, img.height, 0.0);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) g.data()[i] = img.pixels[i] / 1000.0;
    return g;
}

inline std::string encode_mask_pgm(const Mask& m) {
    std::string out = detail::pgm_header(m.width(), m.height(), 255);
    out.reserve(out.size() + m.size());
    for (std::uint8_t x : m.data()) out.push_back(static_cast<char>(x ? 255 : 0));
    return out;
}

inline Mask decode_mask_pgm(std::string_view bytes) {
    const PgmImage img = parse_pgm(bytes);
    if (img.maxval != 255) throw ParseError("mask PGM: maxval must be 255", 0);
    Mask m(img.width, img.height, 0);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const auto x = img.pixels[i];
        if (x != 0 && x != 255) throw ParseError("mask PGM: values must be 0 or 255", img.data_offset + i);
        m.data()[i] = x ? 1 : 0;
    }
    return m;
}

inline void write_mask(const fs::path& path, const Mask& m) { atomic_write(path, encode_mask_pgm(m)); }
inline Mask read_mask(const fs::path& path) { return decode_mask_pgm(read_file(path)); }

// ---------------------------------------------------------------- depth + sidecar

/// Sidecar path: same stem, .json extension.
inline fs::path sidecar_path(const fs::path& depth_path) {
    fs::path p = depth_path;
    p.replace_extension(".json");
    return p;
}

inline json to_json(const CameraIntrinsics& k) {
    return {{"width", k.width}, {"height", k.height}, {"fx", k.fx}, {"fy", k.fy},
            {"cx", k.cx},       {"cy", k.cy},         {"hfov_deg", k.hfov_deg}, {"vfov_deg", k.vfov_deg}};
}

inline CameraIntrinsics intrinsics_from_json(const json& j) {
    CameraIntrinsics k;
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.hfov_deg = j.value("hfov_deg", 0.0);
    k.vfov_deg = j.value("vfov_deg", 0.0);
    k.validate();
    return k;
}

struct FrameMetadata {
    CameraIntrinsics intrinsics;
    double timestamp = 0.0;
    std::optional<SonarReading> sonar;
    std::string provenance = "measured";  // "measured" or "fused"
    long long synthesized_pixels = 0;
    std::string synthesized_mask;         // file name relative to the sidecar, when written
};

inline json to_json(const FrameMetadata& m) {
    json j{{"intrinsics", to_json(m.intrinsics)},
           {"timestamp", m.timestamp},
           {"provenance", m.provenance},
           {"synthesized_pixels", m.synthesized_pixels}};
    if (m.sonar)
        j["sonar"] = {{"range", m.sonar->range}, {"max_range", m.sonar->max_range}, {"timestamp", m.sonar->timestamp}};
    else
        j["sonar"] = nullptr;
    if (!m.synthesized_mask.empty()) j["synthesized_mask"] = m.synthesized_mask;
    return j;
}

inline FrameMetadata metadata_from_json(const json& j) {
    FrameMetadata m;
    m.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    m.timestamp = j.at("timestamp").get<double>();
    if (j.contains("sonar") && !j.at("sonar").is_null()) {
        const json& s = j.at("sonar");
        SonarReading r;
        r.range = s.at("range").get<double>();
        r.max_range = s.value("max_range", 5.0);
        r.timestamp = s.value("timestamp", m.timestamp);
        m.sonar = r;
    }
    m.provenance = j.value("provenance", std::string("measured"));
    m.synthesized_pixels = j.value("synthesized_pixels", 0LL);
    m.synthesized_mask = j.value("synthesized_mask", std::string());
    return m;
}

inline json parse_json(std::string_view text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": " + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

/// Writes `path` (PGM) and its sidecar.
inline void write_depth(const fs::path& path, const DepthFrame& frame, FrameMetadata meta) {
    meta.intrinsics = frame.intrinsics;
    meta.timestamp = frame.timestamp;
    const std::string pgm = encode_depth_pgm(frame.depth);
    atomic_write(path, pgm);
    atomic_write(sidecar_path(path), dump_json(to_json(meta)));
}

inline void write_depth(const fs::path& path, const DepthFrame& frame) { write_depth(path, frame, FrameMetadata{}); }

struct LoadedFrame {
    DepthFrame frame;
    FrameMetadata meta;
};

inline LoadedFrame read_depth(const fs::path& path) {
    LoadedFrame out;
    const Grid<double> depth = decode_depth_pgm(read_file(path));
    const fs::path side = sidecar_path(path);
    try {
        out.meta = metadata_from_json(parse_json(read_file(side), side.string()));
    } catch (const json::exception& e) {
        throw ParseError(side.string() + ": " + e.what(), 0);
    }
    if (depth.width() != out.meta.intrinsics.width || depth.height() != out.meta.intrinsics.height)
        throw StructuralError(path.string() + ": raster size does not match sidecar intrinsics");
    out.frame = DepthFrame(out.meta.intrinsics, out.meta.timestamp);
    out.frame.depth = depth;
    return out;
}

// ---------------------------------------------------------------- pipeline config

namespace detail {

template <typename T>
T get_checked(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ValidationError("config: wrong type for '" + key + "'");
    }
}

}  // namespace detail

/// `preset` selects the base field set; every other key overrides one field.
/// Unknown keys are rejected.
inline PipelineConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    const int preset = j.contains("preset") ? detail::get_checked<int>(j.at("preset"), "preset") : 3;
    PipelineConfig c = PipelineConfig::from_preset(preset);
    for (const auto& [key, val] : j.items()) {
        using detail::get_checked;
        if (key == "preset") continue;
        if (key == "r_b") c.r_b = get_checked<int>(val, key);
        else if (key == "r_in") c.r_in = get_checked<int>(val, key);
        else if (key == "r_out") c.r_out = get_checked<int>(val, key);
        else if (key == "score_lo") c.score_lo = get_checked<double>(val, key);
        else if (key == "score_hi") c.score_hi = get_checked<double>(val, key);
        else if (key == "ring_score_lo") c.ring_score_lo = get_checked<double>(val, key);
        else if (key == "ring_score_hi") c.ring_score_hi = get_checked<double>(val, key);
        else if (key == "roi_fraction") c.roi_fraction = get_checked<double>(val, key);
        else if (key == "circularity_threshold") c.circularity_threshold = get_checked<double>(val, key);
        else if (key == "empty_ratio_max") c.empty_ratio_max = get_checked<double>(val, key);
        else if (key == "patch_size") c.patch_size = get_checked<int>(val, key);
        else if (key == "surround_band_max") c.surround_band_max = get_checked<int>(val, key);
        else if (key == "min_class_separation") c.min_class_separation = get_checked<double>(val, key);
        else if (key == "sonar_enabled") c.sonar_enabled = get_checked<bool>(val, key);
        else if (key == "sonar_margin") c.sonar_margin = get_checked<double>(val, key);
        else if (key == "required_count") c.tracker.required_count = get_checked<int>(val, key);
        else if (key == "max_age") c.tracker.max_age = get_checked<double>(val, key);
        else if (key == "gate_px") c.tracker.gate_px = get_checked<double>(val, key);
        else if (key == "gate_depth") c.tracker.gate_depth = get_checked<double>(val, key);
        else if (key == "min_area") c.min_area = get_checked<long long>(val, key);
        else if (key == "iou_max") c.iou_max = get_checked<double>(val, key);
        else if (key == "border_tolerance") c.border_tolerance = get_checked<double>(val, key);
        else if (key == "exclusion") {
            if (val.is_null()) {
                c.exclusion.reset();
            } else {
                const auto r = get_checked<std::vector<int>>(val, key);
                if (r.size() != 4) throw ValidationError("config: exclusion must be [x, y, width, height]");
                c.exclusion = Rect{r[0], r[1], r[2], r[3]};
            }
        } else if (key == "mode") {
            try {
                c.mode = fill_mode_from_string(get_checked<std::string>(val, key));
            } catch (const ParameterError& e) {
                throw ValidationError(std::string("config: ") + e.what());
            }
        } else if (key == "alpha") c.alpha = get_checked<double>(val, key);
        else if (key == "min_fill_depth") c.min_fill_depth = get_checked<double>(val, key);
        else throw ValidationError("config: unknown key '" + key + "'");
    }
    try {
        c.validate();
    } catch (const ParameterError& e) {
        throw ValidationError(e.what());
    }
    return c;
}

inline json to_json(const PipelineConfig& c) {
    json j{{"preset", c.preset},
           {"r_b", c.r_b},
           {"r_in", c.r_in},
           {"r_out", c.r_out},
           {"score_lo", c.score_lo},
           {"score_hi", c.score_hi},
           {"ring_score_lo", c.ring_score_lo},
           {"ring_score_hi", c.ring_score_hi},
           {"roi_fraction", c.roi_fraction},
           {"circularity_threshold", c.circularity_threshold},
           {"empty_ratio_max", c.empty_ratio_max},
           {"patch_size", c.patch_size},
           {"surround_band_max", c.surround_band_max},
           {"min_class_separation", c.min_class_separation},
           {"sonar_enabled", c.sonar_enabled},
           {"sonar_margin", c.sonar_margin},
           {"required_count", c.tracker.required_count},
           {"max_age", c.tracker.max_age},
           {"gate_px", c.tracker.gate_px},
           {"gate_depth", c.tracker.gate_depth},
           {"min_area", c.min_area},
           {"iou_max", c.iou_max},
           {"border_tolerance", c.border_tolerance},
           {"mode", to_string(c.mode)},
           {"alpha", c.alpha},
           {"min_fill_depth", c.min_fill_depth}};
    if (c.exclusion)
        j["exclusion"] = {c.exclusion->x, c.exclusion->y, c.exclusion->width, c.exclusion->height};
    else
        j["exclusion"] = nullptr;
    return j;
}

inline PipelineConfig load_config(const fs::path& path) {
    return config_from_json(parse_json(read_file(path), path.string()));
}

// ---------------------------------------------------------------- diagnostics

inline json to_json(const Rect& r) { return {r.x, r.y, r.width, r.height}; }

/// One JSONL record. Timings are written only when asked, so that runs can be
/// compared byte for byte.
inline json to_json(const FrameDiagnostics& d, bool include_timing) {
    json cands = json::array();
    for (const CandidateReport& c : d.candidates)
        cands.push_back({{"u", c.u},
                         {"v", c.v},
                         {"bright_score", c.bright_score},
                         {"ring_score", c.ring_score},
                         {"depth_m", c.depth_m},
                         {"circularity", c.circularity},
                         {"bbox", to_json(c.bbox)},
                         {"surround_max_ratio", c.surround_max_ratio},
                         {"status", to_string(c.status)}});
    json conf = json::array();
    for (const ConfirmedSpeckle& s : d.confirmed)
        conf.push_back({{"track_id", s.track_id},
                        {"u", s.u},
                        {"v", s.v},
                        {"depth_m", s.depth_m},
                        {"hit_count", s.hit_count},
                        {"last_seen", s.last_seen},
                        {"detected_this_frame", s.detected_this_frame}});
    json regions = json::array();
    for (const RegionReport& r : d.regions) {
        json jr{{"id", r.id}, {"area", r.area}, {"bbox", to_json(r.bbox)}, {"touches_border", r.touches_border}};
        jr["filled_by_track"] = r.filled_by_track ? json(*r.filled_by_track) : json(nullptr);
        regions.push_back(jr);
    }
    json j{{"timestamp", d.timestamp},
           {"bright_peaks", d.bright_peaks},
           {"ring_peaks", d.ring_peaks},
           {"candidates", cands},
           {"confirmed", conf},
           {"regions", regions},
           {"synthesized_pixels", d.synthesized_pixels},
           {"clamped_pixels", d.clamped_pixels}};
    if (include_timing)
        j["timing"] = {{"gate", d.timing.gate},
                       {"kernels", d.timing.kernels},
                       {"peaks", d.timing.peaks},
                       {"validation", d.timing.validation},
                       {"tracking", d.timing.tracking},
                       {"segmentation", d.timing.segmentation},
                       {"reprojection", d.timing.reprojection},
                       {"total", d.timing.total}};
    return j;
}

// ---------------------------------------------------------------- scene specs

inline json to_json(const PlaneExtent& e) { return {e.x_min, e.x_max, e.y_min, e.y_max}; }

inline PlaneExtent extent_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 4) throw ValidationError("scene: extent must be [x_min, x_max, y_min, y_max]");
    return {v[0], v[1], v[2], v[3]};
}

inline json to_json(const SceneSpec& s) {
    json panes = json::array(), walls = json::array(), clutter = json::array();
    for (const Pane& p : s.panes) {
        json st = json::array();
        for (const auto& e : p.stickers) st.push_back(to_json(e));
        panes.push_back({{"distance", p.distance}, {"yaw_deg", p.yaw_deg}, {"extent", to_json(p.extent)}, {"stickers", st}});
    }
    for (const Wall& w : s.walls) {
        json op = json::array();
        for (const auto& e : w.openings) op.push_back(to_json(e));
        walls.push_back({{"distance", w.distance}, {"yaw_deg", w.yaw_deg}, {"extent", to_json(w.extent)}, {"openings", op}});
    }
    for (const ClutterBox& c : s.clutter) clutter.push_back({{"extent", to_json(c.extent)}, {"depth_offset", c.depth_offset}});
    return {{"panes", panes},
            {"walls", walls},
            {"clutter", clutter},
            {"pose", {{"x", s.pose.x}, {"y", s.pose.y}, {"z", s.pose.z}, {"yaw_deg", s.pose.yaw_deg}}},
            {"noise", {{"sigma", s.noise.sigma}, {"dropout", s.noise.dropout}}},
            {"speckle",
             {{"radius_px", s.speckle.radius_px},
              {"render_probability", s.speckle.render_probability},
              {"max_incidence_deg", s.speckle.max_incidence_deg}}},
            {"seed", s.seed},
            {"timestamp", s.timestamp},
            {"tof_max_range", s.tof_max_range},
            {"sonar_max_range", s.sonar_max_range},
            {"glass_transmits", s.glass_transmits}};
}

inline SceneSpec scene_from_json(const json& j) {
    SceneSpec s;
    try {
        for (const json& p : j.value("panes", json::array())) {
            Pane pane;
            pane.distance = p.value("distance", pane.distance);
            pane.yaw_deg = p.value("yaw_deg", pane.yaw_deg);
            if (p.contains("extent")) pane.extent = extent_from_json(p.at("extent"));
            for (const json& e : p.value("stickers", json::array())) pane.stickers.push_back(extent_from_json(e));
            s.panes.push_back(pane);
        }
        for (const json& w : j.value("walls", json::array())) {
            Wall wall;
            wall.distance = w.value("distance", wall.distance);
            wall.yaw_deg = w.value("yaw_deg", wall.yaw_deg);
            if (w.contains("extent")) wall.extent = extent_from_json(w.at("extent"));
            for (const json& e : w.value("openings", json::array())) wall.openings.push_back(extent_from_json(e));
            s.walls.push_back(wall);
        }
        for (const json& c : j.value("clutter", json::array())) {
            ClutterBox box;
            if (c.contains("extent")) box.extent = extent_from_json(c.at("extent"));
            box.depth_offset = c.value("depth_offset", box.depth_offset);
            s.clutter.push_back(box);
        }
        if (j.contains("pose")) {
            const json& p = j.at("pose");
            s.pose = {p.value("x", 0.0), p.value("y", 0.0), p.value("z", 0.0), p.value("yaw_deg", 0.0)};
        }
        if (j.contains("noise")) s.noise = {j.at("noise").value("sigma", 0.0), j.at("noise").value("dropout", 0.0)};
        if (j.contains("speckle")) {
            const json& sp = j.at("speckle");
            s.speckle.radius_px = sp.value("radius_px", s.speckle.radius_px);
            s.speckle.render_probability = sp.value("render_probability", s.speckle.render_probability);
            s.speckle.max_incidence_deg = sp.value("max_incidence_deg", s.speckle.max_incidence_deg);
        }
        s.seed = j.value("seed", std::uint64_t{0});
        s.timestamp = j.value("timestamp", 0.0);
        s.tof_max_range = j.value("tof_max_range", s.tof_max_range);
        s.sonar_max_range = j.value("sonar_max_range", s.sonar_max_range);
        s.glass_transmits = j.value("glass_transmits", s.glass_transmits);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scene: ") + e.what());
    }
    try {
        s.validate();
    } catch (const ParameterError& e) {
        throw ValidationError(e.what());
    }
    return s;
}

// ---------------------------------------------------------------- manifest

/// One frame of a corpus; paths are relative to the manifest's directory.
struct ManifestEntry {
    std::string depth;
    std::string ground_truth;  // empty when absent
    std::string prediction;    // predicted glass mask, empty when absent
    std::string depth_hash;
    std::string ground_truth_hash;
    std::string prediction_hash;
    // generator provenance, present for synthetic corpora
    std::optional<std::uint64_t> seed;
    std::optional<double> sonar_range;
    json scene;  // null when absent
};

struct Manifest {
    std::string name;
    CameraIntrinsics intrinsics = default_intrinsics();
    std::vector<ManifestEntry> frames;
};

inline json to_json(const Manifest& m) {
    json frames = json::array();
    for (const ManifestEntry& e : m.frames) {
        json f{{"depth", e.depth}, {"depth_hash", e.depth_hash}};
        if (!e.ground_truth.empty()) {
            f["ground_truth"] = e.ground_truth;
            f["ground_truth_hash"] = e.ground_truth_hash;
        }
        if (!e.prediction.empty()) {
            f["prediction"] = e.prediction;
            f["prediction_hash"] = e.prediction_hash;
        }
        if (e.seed) f["seed"] = *e.seed;
        if (e.sonar_range) f["sonar_range"] = *e.sonar_range;
        if (!e.scene.is_null()) f["scene"] = e.scene;
        frames.push_back(f);
    }
    return {{"name", m.name}, {"intrinsics", to_json(m.intrinsics)}, {"frames", frames}};
}

inline Manifest manifest_from_json(const json& j) {
    Manifest m;
    try {
        m.name = j.value("name", std::string());
        m.intrinsics = intrinsics_from_json(j.at("intrinsics"));
        for (const json& f : j.at("frames")) {
            ManifestEntry e;
            e.depth = f.at("depth").get<std::string>();
            e.depth_hash = f.value("depth_hash", std::string());
            e.ground_truth = f.value("ground_truth", std::string());
            e.ground_truth_hash = f.value("ground_truth_hash", std::string());
            e.prediction = f.value("prediction", std::string());
            e.prediction_hash = f.value("prediction_hash", std::string());
            if (f.contains("seed")) e.seed = f.at("seed").get<std::uint64_t>();
            if (f.contains("sonar_range")) e.sonar_range = f.at("sonar_range").get<double>();
            if (f.contains("scene")) e.scene = f.at("scene");
            m.frames.push_back(e);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what(), 0);
    }
    return m;
}

inline Manifest read_manifest(const fs::path& path) {
    return manifest_from_json(parse_json(read_file(path), path.string()));
}

inline void write_manifest(const fs::path& path, const Manifest& m) { atomic_write(path, dump_json(to_json(m))); }

}  // namespace specklemap
