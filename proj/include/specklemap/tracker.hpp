#pragma once

// Tracking-by-detection filter: a speckle is confirmed once it has been
// associated required_count times without a gap longer than max_age.

#include "specklemap/core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

namespace specklemap {

struct TrackerConfig {
    int required_count = 3;
    double max_age = 1.0;     // seconds
    double gate_px = 30.0;    // pixels
    double gate_depth = 0.3;  // metres

    void validate() const {
        if (required_count < 1) throw ParameterError("tracker: required_count must be >= 1");
        if (!(max_age > 0.0)) throw ParameterError("tracker: max_age must be > 0");
        if (!(gate_px > 0.0) || !(gate_depth > 0.0)) throw ParameterError("tracker: gates must be > 0");
    }
};

/// One validated detection handed to the tracker.
struct Detection {
    double u = 0.0;
    double v = 0.0;
    double depth_m = 0.0;
};

struct Track {
    int id = 0;
    double last_u = 0.0;
    double last_v = 0.0;
    double last_depth = 0.0;
    int hit_count = 1;
    double last_seen = 0.0;
    bool confirmed = false;
    std::optional<int> confirmed_at_hit;
};

struct ConfirmedSpeckle {
    int track_id = 0;
    double u = 0.0;
    double v = 0.0;
    double depth_m = 0.0;
    int hit_count = 0;
    double last_seen = 0.0;
    bool detected_this_frame = false;

    bool operator==(const ConfirmedSpeckle&) const = default;
};

class Tracker {
public:
    explicit Tracker(TrackerConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

    const TrackerConfig& config() const { return cfg_; }
    const std::vector<Track>& tracks() const { return tracks_; }

    /// Expire, associate greedily by pixel distance inside both gates, spawn
    /// tracks for leftovers, and report every live confirmed track.
    std::vector<ConfirmedSpeckle> update(const std::vector<Detection>& detections, double now) {
        if (last_now_ && !(now > *last_now_))
            throw ContractError("tracker: timestamps must strictly increase");
        last_now_ = now;

        std::erase_if(tracks_, [&](const Track& t) { return now - t.last_seen > cfg_.max_age; });

        struct Candidate {
            double dist;
            std::size_t track;
            std::size_t det;
        };
        std::vector<Candidate> cands;
        for (std::size_t ti = 0; ti < tracks_.size(); ++ti)
            for (std::size_t di = 0; di < detections.size(); ++di) {
                const Track& t = tracks_[ti];
                const Detection& d = detections[di];
                const double dist = std::hypot(d.u - t.last_u, d.v - t.last_v);
                if (dist <= cfg_.gate_px && std::abs(d.depth_m - t.last_depth) <= cfg_.gate_depth)
                    cands.push_back({dist, ti, di});
            }
        std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
            return std::tie(a.dist, tracks_[a.track].id, a.det) < std::tie(b.dist, tracks_[b.track].id, b.det);
        });

        std::vector<char> track_used(tracks_.size(), 0), det_used(detections.size(), 0);
        for (const Candidate& c : cands) {
            if (track_used[c.track] || det_used[c.det]) continue;
            track_used[c.track] = det_used[c.det] = 1;
            Track& t = tracks_[c.track];
            const Detection& d = detections[c.det];
            t.last_u = d.u;
            t.last_v = d.v;
            t.last_depth = d.depth_m;
            t.last_seen = now;
            ++t.hit_count;
            confirm_if_ready(t);
        }

        for (std::size_t di = 0; di < detections.size(); ++di) {
            if (det_used[di]) continue;
            const Detection& d = detections[di];
            Track t;
            t.id = next_id_++;
            t.last_u = d.u;
            t.last_v = d.v;
            t.last_depth = d.depth_m;
            t.last_seen = now;
            t.hit_count = 1;
            confirm_if_ready(t);
            tracks_.push_back(t);
            track_used.push_back(1);
        }

        std::vector<ConfirmedSpeckle> out;
        for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
            const Track& t = tracks_[ti];
            if (!t.confirmed) continue;
            out.push_back({t.id, t.last_u, t.last_v, t.last_depth, t.hit_count, t.last_seen, t.last_seen == now});
        }
        return out;
    }

    void reset() {
        tracks_.clear();
        next_id_ = 0;
        last_now_.reset();
    }

private:
    void confirm_if_ready(Track& t) const {
        if (!t.confirmed && t.hit_count >= cfg_.required_count) {
            t.confirmed = true;
            t.confirmed_at_hit = t.hit_count;
        }
    }

    TrackerConfig cfg_;
    std::vector<Track> tracks_;
    int next_id_ = 0;
    std::optional<double> last_now_;
};

}  // namespace specklemap
