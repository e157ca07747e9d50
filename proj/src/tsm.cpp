#include "rowtsm/tsm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace rowtsm {

namespace {

long scale_column(int col, int width) {
    return std::lround(static_cast<double>(col) * width / 512.0);
}

// Walks the 8-connected Bresenham segment a->b, visiting endpoints. The walk
// direction is canonicalized so that the pixel set is symmetric under
// endpoint reversal.
template <typename Fn>
void for_each_segment_pixel(PixelCoord a, PixelCoord b, Fn&& fn) {
    const bool swapped = (b.y < a.y) || (b.y == a.y && b.x < a.x);
    if (swapped) std::swap(a, b);

    const int dx = std::abs(b.x - a.x);
    const int dy = std::abs(b.y - a.y);
    const int sx = a.x <= b.x ? 1 : -1;
    const int sy = a.y <= b.y ? 1 : -1;
    int x = a.x, y = a.y;
    if (dx >= dy) {
        int err = 2 * dy - dx;
        for (int i = 0; i <= dx; ++i) {
            fn(x, y);
            if (err > 0) {
                y += sy;
                err -= 2 * dx;
            }
            err += 2 * dy;
            x += sx;
        }
    } else {
        int err = 2 * dx - dy;
        for (int i = 0; i <= dy; ++i) {
            fn(x, y);
            if (err > 0) {
                x += sx;
                err -= 2 * dy;
            }
            err += 2 * dx;
            y += sy;
        }
    }
}

SumCurve normalize(std::vector<double> raw, int argmax) {
    double peak = 0.0;
    for (double v : raw) peak = std::max(peak, v);
    if (peak > 0.0)
        for (double& v : raw) v /= peak;
    return SumCurve{std::move(raw), argmax};
}

// Index of the middle element of the maximal set. Scan sums plateau over
// several columns on thick row masks; taking the plateau's middle keeps the
// pick deterministic and order-independent without the leftward bias an
// always-lowest rule would add.
int argmax_middle(std::span<const int> values) {
    int peak = values[0];
    for (int v : values) peak = std::max(peak, v);
    int count = 0;
    for (int v : values) count += v == peak;
    int target = (count - 1) / 2;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == peak && target-- == 0) return static_cast<int>(i);
    }
    return 0;  // unreachable
}

}  // namespace

TsmConfig TsmConfig::scaled_for(int width) const {
    if (width == 512) return *this;
    TsmConfig scaled = *this;
    scaled.begin_b = static_cast<int>(scale_column(begin_b, width));
    scaled.cease_c = static_cast<int>(scale_column(cease_c, width));
    scaled.default_anchor = static_cast<int>(scale_column(default_anchor, width));
    return scaled;
}

void TsmConfig::validate(int width) const {
    if (width <= 0) throw std::invalid_argument("mask width must be positive");
    if (!(scale_factor_s > 0.0 && scale_factor_s <= 1.0))
        throw std::invalid_argument("scale_factor_s must lie in (0,1]");
    if (anchor_threshold_ratio < 0.0 || anchor_threshold_ratio > 1.0)
        throw std::invalid_argument("anchor_threshold_ratio must lie in [0,1]");
    if (begin_b < 0 || begin_b >= cease_c || cease_c >= width)
        throw std::invalid_argument(
            "scan range invalid for width " + std::to_string(width) + ": requires 0 <= B(" +
            std::to_string(begin_b) + ") < C(" + std::to_string(cease_c) + ") < width");
    if (default_anchor < 0 || default_anchor >= width)
        throw std::invalid_argument("default_anchor outside image");
}

int TsmConfig::strip_height(int image_height) const {
    const int h = static_cast<int>(std::lround(scale_factor_s * image_height));
    return std::clamp(h, 1, image_height);
}

AnchorScanResult anchor_scan(const BinaryMask& mask, const TsmConfig& cfg) {
    cfg.validate(mask.width);
    const int h = cfg.strip_height(mask.height);

    std::vector<int> sums(static_cast<std::size_t>(mask.width), 0);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = mask.pixels.data() + static_cast<std::size_t>(y) * mask.width;
        for (int x = 0; x < mask.width; ++x) sums[x] += row[x];
    }

    const int best = argmax_middle(sums);

    const double peak_ratio = static_cast<double>(sums[best]) / h;
    const bool fallback = sums[best] < cfg.anchor_threshold_ratio * h;

    std::vector<double> raw(sums.begin(), sums.end());
    AnchorScanResult res;
    res.l_x1 = fallback ? cfg.default_anchor : best;
    res.peak_ratio = peak_ratio;
    res.fallback = fallback;
    res.curve = normalize(std::move(raw), best);
    return res;
}

LineScanResult line_scan(const BinaryMask& mask, int anchor, const TsmConfig& cfg) {
    cfg.validate(mask.width);
    if (anchor < 0 || anchor >= mask.width)
        throw std::invalid_argument("anchor column outside image");

    const PixelCoord a{anchor, 0};
    const int bottom = mask.height - 1;
    std::vector<int> sums;
    sums.reserve(static_cast<std::size_t>(cfg.cease_c - cfg.begin_b + 1));
    for (int p = cfg.begin_b; p <= cfg.cease_c; ++p) {
        int sum = 0;
        for_each_segment_pixel(a, PixelCoord{p, bottom}, [&](int x, int y) {
            sum += mask.pixels[static_cast<std::size_t>(y) * mask.width + x];
        });
        sums.push_back(sum);
    }
    const int best = argmax_middle(sums);

    LineScanResult res;
    res.l_x2 = cfg.begin_b + best;
    res.peak = sums[static_cast<std::size_t>(best)];
    res.curve = normalize(std::vector<double>(sums.begin(), sums.end()), best);
    return res;
}

CropRowDetection detect(const BinaryMask& mask, const TsmConfig& cfg) {
    const AnchorScanResult anchor = anchor_scan(mask, cfg);
    const LineScanResult line = line_scan(mask, anchor.l_x1, cfg);

    CropRowDetection det;
    det.l_x1 = anchor.l_x1;
    det.l_x2 = line.l_x2;
    det.delta_theta_deg = heading_from_endpoints(anchor.l_x1, line.l_x2, mask.height);
    det.anchor_fallback = anchor.fallback;
    det.anchor_peak_ratio = anchor.peak_ratio;
    det.line_peak = line.peak;
    return det;
}

std::vector<PixelCoord> rasterize_segment(PixelCoord a, PixelCoord b) {
    std::vector<PixelCoord> out;
    out.reserve(static_cast<std::size_t>(std::max(std::abs(b.x - a.x), std::abs(b.y - a.y))) + 1);
    for_each_segment_pixel(a, b, [&](int x, int y) { out.push_back({x, y}); });
    // Canonical walk order runs top-down; report in caller order.
    if (!out.empty() && !(out.front() == a)) std::reverse(out.begin(), out.end());
    return out;
}

double heading_from_endpoints(int l_x1, int l_x2, int image_height) {
    return std::atan(static_cast<double>(l_x2 - l_x1) / image_height) * 180.0 /
           3.14159265358979323846;
}

void write_curve_csv(const SumCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open curve csv: " + path.string());
    out << "index,value\n";
    char line[64];
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        std::snprintf(line, sizeof(line), "%zu,%.6f\n", i, curve.values[i]);
        out << line;
    }
}

}  // namespace rowtsm
