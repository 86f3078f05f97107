#pragma once

// Pixel-level precision / recall / IoU against the ground-truth glass mask.

#include "specklemap/core.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace specklemap {

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long tn = 0;

    long long total() const { return tp + fp + fn + tn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    bool operator==(const ConfusionCounts&) const = default;
};

inline ConfusionCounts pixel_confusion(const Mask& pred, const Mask& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw StructuralError("pixel_confusion: mask dimensions differ");
    ConfusionCounts c;
    const auto& p = pred.data();
    const auto& g = gt.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool a = p[i] != 0, b = g[i] != 0;
        if (a && b)
            ++c.tp;
        else if (a)
            ++c.fp;
        else if (b)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double iou = 0.0;
};

/// Zero denominators: no prediction scores precision 1 only when there is no
/// glass either; no glass scores recall 1; nothing at all scores IoU 1.
inline Scores scores(const ConfusionCounts& c) {
    Scores s;
    const long long pred = c.tp + c.fp;
    const long long gt = c.tp + c.fn;
    const long long uni = c.tp + c.fp + c.fn;
    s.precision = pred > 0 ? static_cast<double>(c.tp) / pred : (gt == 0 ? 1.0 : 0.0);
    s.recall = gt > 0 ? static_cast<double>(c.tp) / gt : 1.0;
    s.iou = uni > 0 ? static_cast<double>(c.tp) / uni : 1.0;
    return s;
}

/// Accumulates per-frame counts. Precision and recall are pooled over all
/// pixels of the corpus; mIoU averages per-frame IoU over frames with glass.
class CorpusEvaluator {
public:
    void add(const ConfusionCounts& c) {
        pooled_ += c;
        ++frames_;
        if (c.tp + c.fn > 0) {
            iou_sum_ += scores(c).iou;
            ++iou_frames_;
        }
    }

    const ConfusionCounts& pooled() const { return pooled_; }
    int frames() const { return frames_; }
    double precision() const { return scores(pooled_).precision; }
    double recall() const { return scores(pooled_).recall; }
    double miou() const { return iou_frames_ > 0 ? iou_sum_ / iou_frames_ : 1.0; }

private:
    ConfusionCounts pooled_;
    double iou_sum_ = 0.0;
    int frames_ = 0;
    int iou_frames_ = 0;
};

struct ResultRow {
    std::string experiment;
    std::string preset;
    double precision = 0.0;
    double recall = 0.0;
    double miou = 0.0;
    int frames = 0;
};

inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << "experiment,preset,precision,recall,miou,frames\n";
    const auto old_precision = os.precision(6);
    for (const ResultRow& r : rows)
        os << r.experiment << ',' << r.preset << ',' << std::fixed << r.precision << ',' << r.recall << ','
           << r.miou << ',' << r.frames << '\n';
    os.unsetf(std::ios_base::floatfield);
    os.precision(old_precision);
}

}  // namespace specklemap
