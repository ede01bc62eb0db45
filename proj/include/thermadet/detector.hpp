#pragma once

#include "thermadet/types.hpp"

#include <algorithm>
#include <vector>

namespace thermadet::det {

using BinaryImage = Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// One filled region: the pixel indices (row*W + col) it covers, plus the
// traced outer contour in walk order.
struct Region {
    std::vector<int> pixels;
    std::vector<std::pair<int, int>> contour;
};

struct RegionSet {
    int height = 0, width = 0;
    std::vector<Region> regions;
};

// Outer-border following (Moore neighborhood, Jacob stopping criterion) over
// the 8-connected foreground. Each region is the filled interior+border of
// one top-level outer contour, i.e. the hole-filled 8-connected components.
RegionSet contour_regions(const BinaryImage& binary);

// k at the paper's native resolution, rescaled to the actual pixel count so
// the selected top fraction stays comparable across resolutions.
inline int scaled_k(int k_native, int pixels, int reference_pixels = 640 * 480) {
    const double scaled = static_cast<double>(k_native) * pixels / reference_pixels;
    return std::max(1, static_cast<int>(std::lround(scaled)));
}

// |x - xhat| with values below the floor zeroed, so "non-zero" thresholding
// keeps its intended meaning on floating-point reconstructions.
template <typename S>
Image<S> compute_residual(const Image<S>& x, const Image<S>& xhat, double floor = 1e-3) {
    if (x.rows() != xhat.rows() || x.cols() != xhat.cols())
        throw std::invalid_argument("compute_residual: shape mismatch");
    Image<S> r = (x - xhat).cwiseAbs();
    return r.unaryExpr([floor](S v) { return v < S(floor) ? S(0) : v; });
}

template <typename S>
std::vector<Image<S>> compute_residuals(const std::vector<Image<S>>& x, const std::vector<Image<S>>& xhat,
                                        double floor = 1e-3) {
    if (x.size() != xhat.size()) throw std::invalid_argument("compute_residuals: length mismatch");
    std::vector<Image<S>> out;
    out.reserve(x.size());
    for (size_t t = 0; t < x.size(); ++t) out.push_back(compute_residual(x[t], xhat[t], floor));
    return out;
}

template <typename S>
double region_sum(const Image<S>& r, const RegionSet& regions) {
    const int w = static_cast<int>(r.cols());
    double acc = 0.0;
    for (const auto& region : regions.regions)
        for (int p : region.pixels) acc += static_cast<double>(r(p / w, p % w));
    return acc;
}

// Mean of the k largest pixel values (k clamped to the pixel count). The
// result is clamped into [k-th largest, largest], which holds exactly in real
// arithmetic; this keeps plateaus selectable under the ">= threshold" rule
// despite summation rounding.
template <typename S>
double top_k_mean(const Image<S>& r, int k) {
    const auto n = r.size();
    k = static_cast<int>(std::min<long>(std::max(1, k), n));
    std::vector<S> values(r.data(), r.data() + n);
    std::nth_element(values.begin(), values.begin() + (k - 1), values.end(), std::greater<S>());
    double acc = 0.0;
    double top = static_cast<double>(values[0]);
    for (int i = 0; i < k; ++i) {
        acc += static_cast<double>(values[i]);
        top = std::max(top, static_cast<double>(values[i]));
    }
    const double kth = static_cast<double>(values[k - 1]);
    return std::clamp(acc / k, kth, top);
}

// One step of the contour detector: the share of residual energy that sits
// inside high-residual contours.
//   binary_1 = r > 0            -> res      = residual sum over its regions
//   threshold = top-k mean      -> binary_2 = r >= threshold
//   score = res_high / res (0 when res is 0)
template <typename S>
double frame_score(const Image<S>& r, int k) {
    const int h = static_cast<int>(r.rows());
    const int w = static_cast<int>(r.cols());
    BinaryImage binary1(h, w);
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col) binary1(row, col) = r(row, col) > S(0) ? 1 : 0;
    const double res = region_sum(r, contour_regions(binary1));
    if (res <= 0.0) return 0.0;

    const double threshold = top_k_mean(r, k);
    BinaryImage binary2(h, w);
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col)
            binary2(row, col) = static_cast<double>(r(row, col)) >= threshold ? 1 : 0;
    const double res_high = region_sum(r, contour_regions(binary2));
    return res_high / res;
}

// Baseline score without the contour machinery: the plain residual mean.
template <typename S>
double mean_residual_score(const Image<S>& r) {
    return r.template cast<double>().mean();
}

// Majority-voted sequence decision over per-step scores.
struct ScoreSeries {
    std::vector<double> scores;
    int votes = 0;
    bool anomaly = false;
    double epsilon = 0.0;
};

inline ScoreSeries sequence_verdict(const std::vector<double>& scores, double epsilon) {
    if (scores.empty()) throw std::invalid_argument("sequence_verdict: empty score series");
    ScoreSeries s;
    s.scores = scores;
    s.epsilon = epsilon;
    for (double v : scores) s.votes += (v > epsilon) ? 1 : 0;
    s.anomaly = s.votes * 2 > static_cast<int>(scores.size());  // strict "> T/2"
    return s;
}

}  // namespace thermadet::det
