#pragma once

// Composition root: gate -> kernels -> validation -> tracker -> segmentation
// -> reprojection, under a preset configuration, with per-stage timing.

#include "specklemap/core.hpp"
#include "specklemap/filters.hpp"
#include "specklemap/kernels.hpp"
#include "specklemap/reprojection.hpp"
#include "specklemap/segmentation.hpp"
#include "specklemap/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace specklemap {

enum class FillMode { linear, exact };

inline const char* to_string(FillMode m) { return m == FillMode::linear ? "linear" : "exact"; }

inline FillMode fill_mode_from_string(const std::string& s) {
    if (s == "linear") return FillMode::linear;
    if (s == "exact") return FillMode::exact;
    throw ParameterError("unknown reprojection mode '" + s + "' (expected linear or exact)");
}

/// Gradient gain fitted by calibrate_alpha() for the default 640x480, 56x44 deg
/// camera against a 10 degree pane at 2 m.
inline constexpr double kDefaultAlpha = -2.838887e-6;

struct PipelineConfig {
    int preset = 3;

    int r_b = 21;
    int r_in = 11;
    int r_out = 21;
    double score_lo = 0.3;
    double score_hi = 0.9;
    double ring_score_lo = 0.3;
    double ring_score_hi = 0.9;
    double roi_fraction = 0.8;

    double circularity_threshold = 0.5;
    double empty_ratio_max = 0.3;
    int patch_size = 64;
    int surround_band_max = 24;
    double min_class_separation = 0.1;

    bool sonar_enabled = true;
    double sonar_margin = 0.2;

    TrackerConfig tracker;

    long long min_area = 400;
    double iou_max = 0.3;
    double border_tolerance = 1.0;
    std::optional<Rect> exclusion;

    FillMode mode = FillMode::linear;
    double alpha = kDefaultAlpha;
    double min_fill_depth = 0.05;

    /// Preset 1: no sonar, strict shape/emptiness thresholds.
    /// Preset 2: sonar, circularity 0.56, emptiness 0.07.
    /// Preset 3: sonar, circularity 0.5, emptiness 0.3.
    static PipelineConfig from_preset(int id) {
        PipelineConfig c;
        c.preset = id;
        switch (id) {
            case 1:
                c.sonar_enabled = false;
                c.circularity_threshold = 0.56;
                c.empty_ratio_max = 0.07;
                break;
            case 2:
                c.sonar_enabled = true;
                c.circularity_threshold = 0.56;
                c.empty_ratio_max = 0.07;
                break;
            case 3:
                c.sonar_enabled = true;
                c.circularity_threshold = 0.5;
                c.empty_ratio_max = 0.3;
                break;
            default:
                throw ParameterError("unknown preset " + std::to_string(id) + " (expected 1, 2 or 3)");
        }
        return c;
    }

    void validate() const {
        if (r_b < 1 || r_in < 1 || r_in >= r_out) throw ParameterError("config: invalid kernel radii");
        if (!(score_lo >= 0.0 && score_lo < score_hi && score_hi <= 1.0))
            throw ParameterError("config: invalid bright score band");
        if (!(ring_score_lo >= 0.0 && ring_score_lo < ring_score_hi && ring_score_hi <= 1.0))
            throw ParameterError("config: invalid ring score band");
        if (!(roi_fraction > 0.0 && roi_fraction <= 1.0)) throw ParameterError("config: roi_fraction must be in (0, 1]");
        if (!(empty_ratio_max > 0.0)) throw ParameterError("config: empty_ratio_max must be > 0");
        if (patch_size < 3) throw ParameterError("config: patch_size must be >= 3");
        if (surround_band_max < 1) throw ParameterError("config: surround_band_max must be >= 1");
        if (!(sonar_margin >= 0.0)) throw ParameterError("config: sonar_margin must be >= 0");
        tracker.validate();
        if (min_area < 1) throw ParameterError("config: min_area must be >= 1");
        if (!(iou_max > 0.0 && iou_max < 1.0)) throw ParameterError("config: iou_max must be in (0, 1)");
        if (!(min_fill_depth > 0.0)) throw ParameterError("config: min_fill_depth must be > 0");
    }
};

enum class CandidateStatus { accepted, rejected_empty_patch, rejected_circularity, rejected_empty_space };

inline const char* to_string(CandidateStatus s) {
    switch (s) {
        case CandidateStatus::accepted: return "accepted";
        case CandidateStatus::rejected_empty_patch: return "empty_patch";
        case CandidateStatus::rejected_circularity: return "circularity";
        case CandidateStatus::rejected_empty_space: return "empty_space";
    }
    return "unknown";
}

struct CandidateReport {
    int u = 0;
    int v = 0;
    double bright_score = 0.0;
    double ring_score = 0.0;
    double depth_m = 0.0;
    double circularity = 0.0;
    Rect bbox;
    double surround_max_ratio = 0.0;
    CandidateStatus status = CandidateStatus::accepted;
};

struct RegionReport {
    int id = 0;
    long long area = 0;
    Rect bbox;
    bool touches_border = false;
    std::optional<int> filled_by_track;
};

struct StageTiming {
    double gate = 0.0;
    double kernels = 0.0;
    double peaks = 0.0;
    double validation = 0.0;
    double tracking = 0.0;
    double segmentation = 0.0;
    double reprojection = 0.0;
    double total = 0.0;
};

struct FrameDiagnostics {
    double timestamp = 0.0;
    std::size_t bright_peaks = 0;
    std::size_t ring_peaks = 0;
    std::vector<CandidateReport> candidates;
    std::vector<ConfirmedSpeckle> confirmed;
    std::vector<RegionReport> regions;
    long long synthesized_pixels = 0;
    long long clamped_pixels = 0;
    StageTiming timing;
};

struct FrameResult {
    FusedDepthFrame fused;
    FrameDiagnostics diagnostics;
};

namespace detail {

class StageClock {
public:
    StageClock() : start_(std::chrono::steady_clock::now()), last_(start_) {}
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }
    double elapsed() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_;
    std::chrono::steady_clock::time_point last_;
};

}  // namespace detail

/// Runs one frame through the whole chain. The tracker carries state between
/// frames; everything else is recomputed.
inline FrameResult process_frame(const PipelineConfig& cfg, Tracker& tracker, const DepthFrame& input,
                                 const SonarReading& sonar) {
    detail::StageClock clock;
    const DepthFrame frame = validate_frame(input);
    const int W = frame.width(), H = frame.height();

    FrameResult result{FusedDepthFrame(frame), {}};
    FrameDiagnostics& diag = result.diagnostics;
    diag.timestamp = frame.timestamp;

    DepthFrame gated = frame;
    if (cfg.sonar_enabled) {
        sonar.validate();
        gated = sonar_gate(frame, sonar, cfg.sonar_margin);
    }
    const Mask valid = validity_mask(gated);
    diag.timing.gate = clock.lap();

    // Bright kernel scores valid returns; ring kernel scores missing ones.
    Grid<double> bright_in(W, H, 0.0), ring_in(W, H, 0.0);
    for (std::size_t i = 0; i < valid.size(); ++i) {
        bright_in.data()[i] = valid.data()[i] ? 1.0 : 0.0;
        ring_in.data()[i] = valid.data()[i] ? 0.0 : 1.0;
    }
    const Rect roi = centered_roi(W, H, cfg.roi_fraction);
    const ResponseMap bright_map = convolve_roi(bright_in, build_bright_kernel(cfg.r_b), roi);
    const ResponseMap ring_map = convolve_roi(ring_in, build_dark_ring_kernel(cfg.r_in, cfg.r_out), roi);
    diag.timing.kernels = clock.lap();

    const auto bright_peaks = detect_peaks(bright_map, cfg.score_lo, cfg.score_hi);
    const auto ring_peaks = detect_peaks(ring_map, cfg.ring_score_lo, cfg.ring_score_hi);
    diag.bright_peaks = bright_peaks.size();
    diag.ring_peaks = ring_peaks.size();
    const auto candidates =
        pair_peaks(bright_peaks, ring_peaks, cfg.r_out, gated, PairingOptions{cfg.r_in, cfg.patch_size});
    diag.timing.peaks = clock.lap();

    const IntegralImage ii(valid);
    const BinarizeOptions bin_opts{64, cfg.min_class_separation};
    std::vector<Detection> detections;
    for (const SpeckleCandidate& c : candidates) {
        CandidateReport rep;
        rep.u = c.center_u;
        rep.v = c.center_v;
        rep.bright_score = c.bright_peak.score;
        rep.ring_score = c.ring_peak.score;
        rep.depth_m = c.depth_m;

        const Mask binary = binarize_patch(c.patch, bin_opts);
        if (std::none_of(binary.data().begin(), binary.data().end(), [](std::uint8_t b) { return b != 0; })) {
            rep.status = CandidateStatus::rejected_empty_patch;
            diag.candidates.push_back(rep);
            continue;
        }
        const CircularityResult circ = circularity(binary, cfg.circularity_threshold);
        rep.circularity = circ.c;
        rep.bbox = intersect(Rect{c.patch_x + circ.bbox.x, c.patch_y + circ.bbox.y, circ.bbox.width, circ.bbox.height},
                             Rect{0, 0, W, H});
        if (!circ.pass) {
            rep.status = CandidateStatus::rejected_circularity;
            diag.candidates.push_back(rep);
            continue;
        }
        const int band = std::min(std::max(rep.bbox.width, rep.bbox.height), cfg.surround_band_max);
        const SurroundResult sur = measure_surround(ii, rep.bbox, cfg.empty_ratio_max, std::max(1, band));
        rep.surround_max_ratio = sur.max_ratio;
        if (!sur.empty) {
            rep.status = CandidateStatus::rejected_empty_space;
            diag.candidates.push_back(rep);
            continue;
        }
        rep.status = CandidateStatus::accepted;
        diag.candidates.push_back(rep);
        detections.push_back({static_cast<double>(c.center_u), static_cast<double>(c.center_v), c.depth_m});
    }
    diag.timing.validation = clock.lap();

    diag.confirmed = tracker.update(detections, frame.timestamp);
    diag.timing.tracking = clock.lap();

    std::vector<Region> regions;
    if (!diag.confirmed.empty()) {
        SegmentationOptions seg;
        seg.min_area = cfg.min_area;
        seg.border_tolerance = cfg.border_tolerance;
        seg.exclusion = cfg.exclusion;
        regions = nms_merge(segment_empty_regions(gated, seg), cfg.iou_max);
    }
    for (const Region& r : regions) diag.regions.push_back({r.id, r.area, r.bbox, r.touches_border, std::nullopt});
    diag.timing.segmentation = clock.lap();

    // Fresh detections first, then the longest-lived tracks; one fill per region.
    std::vector<ConfirmedSpeckle> order = diag.confirmed;
    std::stable_sort(order.begin(), order.end(), [](const ConfirmedSpeckle& a, const ConfirmedSpeckle& b) {
        if (a.detected_this_frame != b.detected_this_frame) return a.detected_this_frame;
        if (a.hit_count != b.hit_count) return a.hit_count > b.hit_count;
        return a.track_id < b.track_id;
    });
    for (const ConfirmedSpeckle& s : order) {
        const auto idx = region_for_speckle(regions, s, cfg.r_out);
        if (!idx || diag.regions[*idx].filled_by_track) continue;
        diag.regions[*idx].filled_by_track = s.track_id;
        if (cfg.mode == FillMode::linear) {
            linear_gradient_fill(regions[*idx], s, frame.intrinsics, cfg.alpha, result.fused, cfg.min_fill_depth);
        } else {
            plane_intersection_fill(regions[*idx], estimate_plane(s, frame.intrinsics), frame.intrinsics,
                                    result.fused);
        }
    }
    diag.synthesized_pixels = result.fused.synthesized_count();
    diag.clamped_pixels = result.fused.clamped_pixels;
    diag.timing.reprojection = clock.lap();
    diag.timing.total = clock.elapsed();
    return result;
}

/// One stream: configuration plus tracker state.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)), tracker_(cfg_.tracker) { cfg_.validate(); }

    FrameResult process(const DepthFrame& frame, const SonarReading& sonar) {
        return process_frame(cfg_, tracker_, frame, sonar);
    }

    const PipelineConfig& config() const { return cfg_; }
    const Tracker& tracker() const { return tracker_; }

private:
    PipelineConfig cfg_;
    Tracker tracker_;
};

}  // namespace specklemap
