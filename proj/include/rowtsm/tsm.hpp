// Triangle scan method: central crop-row extraction from a binary mask.
//
// Two argmax scans over a triangular ROI. The anchor scan column-sums a top
// strip of height h = s*H and takes the peak column as the row's upper point
// L_x1 (with a preset fallback when the peak is too weak). The line scan
// rasterizes candidate segments from the anchor to every bottom-edge point
// between columns B and C and takes the peak-sum segment's endpoint as L_x2.
#pragma once

#include <vector>

#include "rowtsm/mask.hpp"

namespace rowtsm {

struct TsmConfig {
    double scale_factor_s = 0.2;
    int begin_b = 190;              // bottom scan segment start, at width 512
    int cease_c = 350;              // bottom scan segment end, at width 512
    double anchor_threshold_ratio = 0.4;
    int default_anchor = 277;       // preset anchor column, at width 512

    // B, C and the default anchor scale linearly with image width; s and the
    // threshold ratio are width-independent.
    TsmConfig scaled_for(int width) const;

    void validate(int width) const;  // throws std::invalid_argument
    int strip_height(int image_height) const;
};

// Normalized scan profile (peak = 1 whenever any foreground was seen).
struct SumCurve {
    std::vector<double> values;
    int argmax_index = 0;
};

struct AnchorScanResult {
    int l_x1 = 0;
    double peak_ratio = 0.0;  // raw peak column sum / strip height
    bool fallback = false;
    SumCurve curve;           // one value per image column
};

struct LineScanResult {
    int l_x2 = 0;
    int peak = 0;             // foreground count along the winning segment
    SumCurve curve;           // one value per candidate column in [B, C]
};

struct CropRowDetection {
    int l_x1 = 0;
    int l_x2 = 0;
    double delta_theta_deg = 0.0;  // signed; positive when l_x2 > l_x1
    bool anchor_fallback = false;
    double anchor_peak_ratio = 0.0;
    int line_peak = 0;
};

struct PixelCoord {
    int x = 0;
    int y = 0;
    bool operator==(const PixelCoord&) const = default;
};

AnchorScanResult anchor_scan(const BinaryMask& mask, const TsmConfig& cfg);
LineScanResult line_scan(const BinaryMask& mask, int anchor, const TsmConfig& cfg);
CropRowDetection detect(const BinaryMask& mask, const TsmConfig& cfg);

// 8-connected Bresenham segment, endpoints included, symmetric up to reversal.
std::vector<PixelCoord> rasterize_segment(PixelCoord a, PixelCoord b);

// Heading of the line through (l_x1, 0) and (l_x2, H) versus vertical, degrees.
double heading_from_endpoints(int l_x1, int l_x2, int image_height);

void write_curve_csv(const SumCurve& curve, const std::filesystem::path& path);

}  // namespace rowtsm
