#include "doctest.h"

#include <cmath>
#include <random>

#include "rowtsm/tsm.hpp"

using namespace rowtsm;

namespace {

// Segment plus a strip-height anchor tick: the tick pins the anchor argmax to
// column a (no rival column can reach the full strip height), and any rival
// AP line misses the segment's bottom endpoint, so line-scan recovery of p is
// strict. Top-strip density equals h, comfortably above the 0.4h threshold.
BinaryMask segment_scene(int a, int p, int size = 512, double s = 0.2) {
    BinaryMask m(size, size);
    for (const PixelCoord& px : rasterize_segment({a, 0}, {p, size - 1})) m.set(px.x, px.y, true);
    const int h = static_cast<int>(std::lround(s * size));
    for (int y = 0; y < h; ++y) m.set(a, y, true);
    return m;
}

void draw_thick_line(BinaryMask& m, int a, int p, int half_width) {
    for (const PixelCoord& px : rasterize_segment({a, 0}, {p, m.height - 1}))
        for (int dx = -half_width; dx <= half_width; ++dx)
            if (px.x + dx >= 0 && px.x + dx < m.width) m.set(px.x + dx, px.y, true);
}

}  // namespace

TEST_CASE("rasterize_segment: vertical and diagonal basics") {
    const auto vertical = rasterize_segment({0, 0}, {0, 5});
    REQUIRE(vertical.size() == 6);
    for (int y = 0; y < 6; ++y) CHECK(vertical[static_cast<std::size_t>(y)] == PixelCoord{0, y});

    const auto diagonal = rasterize_segment({0, 0}, {3, 3});
    const std::vector<PixelCoord> expect{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    CHECK(diagonal == expect);
}

TEST_CASE("rasterize_segment: pixel count, endpoints, connectivity, symmetry") {
    std::mt19937 gen(42);
    std::uniform_int_distribution<int> coord(0, 511);
    for (int i = 0; i < 300; ++i) {
        const PixelCoord a{coord(gen), coord(gen)};
        const PixelCoord b{coord(gen), coord(gen)};
        const auto pixels = rasterize_segment(a, b);

        const std::size_t expect_len =
            static_cast<std::size_t>(std::max(std::abs(b.x - a.x), std::abs(b.y - a.y))) + 1;
        REQUIRE(pixels.size() == expect_len);
        CHECK(pixels.front() == a);
        CHECK(pixels.back() == b);
        for (std::size_t k = 1; k < pixels.size(); ++k) {
            const int dx = std::abs(pixels[k].x - pixels[k - 1].x);
            const int dy = std::abs(pixels[k].y - pixels[k - 1].y);
            CHECK(dx <= 1);
            CHECK(dy <= 1);
            CHECK(dx + dy >= 1);
        }

        auto reversed = rasterize_segment(b, a);
        std::reverse(reversed.begin(), reversed.end());
        CHECK(pixels == reversed);
    }
}

TEST_CASE("anchor_scan: all-background falls back to the preset anchor") {
    const BinaryMask m(512, 512);
    const auto res = anchor_scan(m, TsmConfig{});
    CHECK(res.l_x1 == 277);
    CHECK(res.fallback);
    CHECK(res.peak_ratio == 0.0);
    for (double v : res.curve.values) CHECK(v == 0.0);
}

TEST_CASE("anchor_scan: unique full-height column wins with ratio 1") {
    BinaryMask m(512, 512);
    for (int y = 0; y < 512; ++y) m.set(300, y, true);
    const auto res = anchor_scan(m, TsmConfig{});
    CHECK(res.l_x1 == 300);
    CHECK(res.peak_ratio == 1.0);
    CHECK_FALSE(res.fallback);
    CHECK(res.curve.argmax_index == 300);
    CHECK(res.curve.values[300] == 1.0);
}

TEST_CASE("anchor_scan: threshold boundary is inclusive (brute-force constructed columns)") {
    const TsmConfig cfg;

    // 512x512: h = round(0.2*512) = 102, so the smallest passing integer
    // column sum is ceil(0.4*102) = 41.
    const int h = cfg.strip_height(512);
    REQUIRE(h == 102);
    const int pass = static_cast<int>(std::ceil(cfg.anchor_threshold_ratio * h));

    BinaryMask at(512, 512);
    for (int y = 0; y < pass; ++y) at.set(123, y, true);
    auto res = anchor_scan(at, cfg);
    CHECK_FALSE(res.fallback);
    CHECK(res.l_x1 == 123);

    BinaryMask below(512, 512);
    for (int y = 0; y < pass - 1; ++y) below.set(123, y, true);
    res = anchor_scan(below, cfg);
    CHECK(res.fallback);
    CHECK(res.l_x1 == 277);
    CHECK(res.peak_ratio == doctest::Approx((pass - 1) / static_cast<double>(h)));

    // 500x500: h = 100 makes 0.4h = 40 exactly; a sum equal to the threshold
    // must not fall back.
    const TsmConfig cfg500 = cfg.scaled_for(500);
    const int h500 = cfg500.strip_height(500);
    REQUIRE(h500 == 100);
    BinaryMask exact(500, 500);
    for (int y = 0; y < 40; ++y) exact.set(200, y, true);
    CHECK_FALSE(anchor_scan(exact, cfg500).fallback);
    BinaryMask under(500, 500);
    for (int y = 0; y < 39; ++y) under.set(200, y, true);
    CHECK(anchor_scan(under, cfg500).fallback);
}

TEST_CASE("line_scan: vertical line is its own best scan") {
    BinaryMask m(512, 512);
    for (int y = 0; y < 512; ++y) m.set(277, y, true);
    const auto res = line_scan(m, 277, TsmConfig{});
    CHECK(res.l_x2 == 277);
    CHECK(res.peak == 512);
    CHECK(res.curve.argmax_index == 277 - 190);
    CHECK(res.curve.values[static_cast<std::size_t>(res.curve.argmax_index)] == 1.0);
}

TEST_CASE("line_scan: recovers the generator endpoint of a rasterized segment") {
    BinaryMask m(512, 512);
    for (const PixelCoord& px : rasterize_segment({256, 0}, {320, 511})) m.set(px.x, px.y, true);
    const auto res = line_scan(m, 256, TsmConfig{});
    CHECK(res.l_x2 == 320);
    CHECK(res.peak == 512);
}

TEST_CASE("line_scan: degenerate all-background mask ties to the lowest column") {
    const BinaryMask m(512, 512);
    const auto res = line_scan(m, 277, TsmConfig{});
    CHECK(res.l_x2 == 190);
    CHECK(res.peak == 0);
}

TEST_CASE("detect: perfect vertical center line") {
    BinaryMask m(512, 512);
    for (int y = 0; y < 512; ++y) m.set(256, y, true);
    const auto det = detect(m, TsmConfig{});
    CHECK(det.l_x1 == 256);
    CHECK(det.l_x2 == 256);
    CHECK(det.delta_theta_deg == 0.0);
    CHECK_FALSE(det.anchor_fallback);
    CHECK(det.line_peak == 512);
}

TEST_CASE("heading formula: 45 degrees for a one-to-one slope") {
    CHECK(heading_from_endpoints(0, 512, 512) == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(heading_from_endpoints(512, 0, 512) == doctest::Approx(-45.0).epsilon(1e-12));
    CHECK(heading_from_endpoints(100, 100, 512) == 0.0);
}

TEST_CASE("detect: exact recovery of rasterized segment scenes") {
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> a_dist(64, 448);
    std::uniform_int_distribution<int> p_dist(190, 350);
    const TsmConfig cfg;
    for (int i = 0; i < 250; ++i) {
        const int a = a_dist(gen), p = p_dist(gen);
        const BinaryMask m = segment_scene(a, p);
        const auto det = detect(m, cfg);
        REQUIRE(det.l_x1 == a);
        REQUIRE(det.l_x2 == p);
        CHECK_FALSE(det.anchor_fallback);
        CHECK(det.delta_theta_deg == heading_from_endpoints(a, p, 512));
        CHECK(det.line_peak == 512);
    }
}

TEST_CASE("detect: translation covariance for in-range lines") {
    std::mt19937 gen(17);
    std::uniform_int_distribution<int> a_dist(150, 350);
    std::uniform_int_distribution<int> p_dist(210, 320);
    std::uniform_int_distribution<int> k_dist(-15, 15);
    const TsmConfig cfg;
    for (int i = 0; i < 40; ++i) {
        const int a = a_dist(gen), p = p_dist(gen), k = k_dist(gen);
        if (p + k < cfg.begin_b || p + k > cfg.cease_c) continue;
        const auto base = detect(segment_scene(a, p), cfg);
        const auto shifted = detect(segment_scene(a + k, p + k), cfg);
        CHECK(shifted.l_x1 == base.l_x1 + k);
        CHECK(shifted.l_x2 == base.l_x2 + k);
        CHECK(shifted.anchor_fallback == base.anchor_fallback);
    }
}

TEST_CASE("detect: l_x2 always stays inside [B, C]") {
    std::mt19937 gen(23);
    std::uniform_int_distribution<int> bit(0, 99);
    const TsmConfig cfg;
    for (int i = 0; i < 10; ++i) {
        BinaryMask m(512, 512);
        for (auto& px : m.pixels) px = bit(gen) < 7;
        const auto det = detect(m, cfg);
        CHECK(det.l_x2 >= cfg.begin_b);
        CHECK(det.l_x2 <= cfg.cease_c);
    }
}

TEST_CASE("SumCurve: values normalized to [0,1], argmax consistent") {
    std::mt19937 gen(29);
    std::uniform_int_distribution<int> bit(0, 99);
    const TsmConfig cfg;
    for (int i = 0; i < 8; ++i) {
        BinaryMask m(512, 512);
        for (auto& px : m.pixels) px = bit(gen) < 10;
        const auto anchor = anchor_scan(m, cfg);
        double peak = 0.0;
        for (double v : anchor.curve.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            peak = std::max(peak, v);
        }
        CHECK(peak == 1.0);  // some foreground was seen
        if (!anchor.fallback) CHECK(anchor.curve.argmax_index == anchor.l_x1);

        const auto line = line_scan(m, anchor.l_x1, cfg);
        CHECK(line.curve.values.size() ==
              static_cast<std::size_t>(cfg.cease_c - cfg.begin_b + 1));
        CHECK(line.curve.argmax_index == line.l_x2 - cfg.begin_b);
        CHECK(line.curve.values[static_cast<std::size_t>(line.curve.argmax_index)] == 1.0);
    }
}

// Additions along the winning AP line below the anchor strip cannot touch the
// anchor sums, and the winning line's sum grows at least as fast as any
// rival's, so the detection is unchanged for any mask whatsoever.
TEST_CASE("monotone robustness: additions along the winning line below the strip") {
    std::mt19937 gen(31);
    std::uniform_int_distribution<int> bit(0, 99);
    const TsmConfig cfg;
    for (int i = 0; i < 12; ++i) {
        BinaryMask m(512, 512);
        for (auto& px : m.pixels) px = bit(gen) < 5;
        draw_thick_line(m, 200 + 10 * i, 210 + 8 * i, 2);
        const auto before = detect(m, cfg);

        const int h = cfg.strip_height(512);
        BinaryMask grown = m;
        int added = 0;
        for (const PixelCoord& px : rasterize_segment({before.l_x1, 0}, {before.l_x2, 511})) {
            if (px.y >= h && !grown.at(px.x, px.y)) {
                grown.set(px.x, px.y, true);
                ++added;
            }
        }
        CAPTURE(added);
        const auto after = detect(grown, cfg);
        CHECK(after.l_x1 == before.l_x1);
        CHECK(after.l_x2 == before.l_x2);
        CHECK(after.anchor_fallback == before.anchor_fallback);
    }
}

TEST_CASE("monotone robustness: full-line additions on row-like scenes") {
    std::mt19937 gen(37);
    std::uniform_int_distribution<int> a_dist(180, 340);
    std::uniform_int_distribution<int> p_dist(200, 340);
    std::uniform_int_distribution<int> bit(0, 999);
    const TsmConfig cfg;
    for (int i = 0; i < 12; ++i) {
        BinaryMask m(512, 512);
        draw_thick_line(m, a_dist(gen), p_dist(gen), 3);
        for (auto& px : m.pixels)
            if (px && bit(gen) < 40) px = 0;  // nibble holes into the line
        const auto before = detect(m, cfg);

        BinaryMask grown = m;
        for (const PixelCoord& px : rasterize_segment({before.l_x1, 0}, {before.l_x2, 511}))
            grown.set(px.x, px.y, true);
        const auto after = detect(grown, cfg);
        CHECK(after.l_x1 == before.l_x1);
        CHECK(after.l_x2 == before.l_x2);
    }
}

TEST_CASE("TsmConfig: validation and width scaling") {
    const TsmConfig cfg;
    CHECK_THROWS_AS(cfg.validate(256), std::invalid_argument);  // C=350 >= width
    CHECK_NOTHROW(cfg.validate(512));

    const TsmConfig half = cfg.scaled_for(256);
    CHECK(half.begin_b == 95);
    CHECK(half.cease_c == 175);
    CHECK(half.default_anchor == 139);
    CHECK(half.scale_factor_s == cfg.scale_factor_s);
    CHECK(half.anchor_threshold_ratio == cfg.anchor_threshold_ratio);
    CHECK_NOTHROW(half.validate(256));

    const TsmConfig same = cfg.scaled_for(512);
    CHECK(same.begin_b == cfg.begin_b);

    TsmConfig bad = cfg;
    bad.scale_factor_s = 0.0;
    CHECK_THROWS_AS(bad.validate(512), std::invalid_argument);
    bad = cfg;
    bad.begin_b = 400;  // B >= C
    CHECK_THROWS_AS(bad.validate(512), std::invalid_argument);

    BinaryMask tiny(256, 256);
    CHECK_THROWS_AS(anchor_scan(tiny, cfg), std::invalid_argument);
    CHECK_THROWS_AS(line_scan(tiny, 300, cfg.scaled_for(256)), std::invalid_argument);
}
