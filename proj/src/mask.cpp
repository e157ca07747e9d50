#include "rowtsm/mask.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

namespace rowtsm {

BinaryMask::BinaryMask(int w, int h, bool fill) : width(w), height(h) {
    if (w <= 0 || h <= 0)
        throw std::invalid_argument("mask dimensions must be positive");
    pixels.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::size_t BinaryMask::foreground_count() const {
    std::size_t n = 0;
    for (std::uint8_t p : pixels) n += p != 0;
    return n;
}

void DegradeSpec::validate() const {
    if (dropout_block_size < 1)
        throw std::invalid_argument("dropout_block_size must be >= 1");
    if (dropout_probability < 0.0 || dropout_probability > 1.0)
        throw std::invalid_argument("dropout_probability must lie in [0,1]");
    if (speckle_probability < 0.0 || speckle_probability > 1.0)
        throw std::invalid_argument("speckle_probability must lie in [0,1]");
    if (dilation_radius < 0)
        throw std::invalid_argument("dilation_radius must be >= 0");
}

namespace {

class PgmReader {
public:
    explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments (which run to end of line).
    void skip_separators() {
        while (pos_ < bytes_.size()) {
            std::uint8_t c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    int read_int(const char* what) {
        skip_separators();
        if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9')
            throw std::runtime_error(std::string("malformed PGM header: expected ") + what);
        long long v = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1'000'000'000LL)
                throw std::runtime_error(std::string("malformed PGM header: ") + what + " out of range");
            ++pos_;
        }
        return static_cast<int>(v);
    }

    std::size_t pos() const { return pos_; }
    std::span<const std::uint8_t> remainder() const { return bytes_.subspan(pos_); }

    void expect_magic() {
        if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '5')
            throw std::runtime_error("malformed PGM header: missing P5 magic");
        pos_ = 2;
    }

    void consume_single_separator() {
        if (pos_ >= bytes_.size())
            throw std::runtime_error("truncated PGM: no pixel data");
        std::uint8_t c = bytes_[pos_];
        if (c != ' ' && c != '\t' && c != '\r' && c != '\n')
            throw std::runtime_error("malformed PGM header: maxval not followed by whitespace");
        ++pos_;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

// Uniform in [0,1) with a platform-independent mapping from mt19937_64.
double unit_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

BinaryMask load_mask(std::span<const std::uint8_t> bytes, int threshold) {
    PgmReader r(bytes);
    r.expect_magic();
    const int w = r.read_int("width");
    const int h = r.read_int("height");
    const int maxval = r.read_int("maxval");
    if (w <= 0 || h <= 0)
        throw std::runtime_error("malformed PGM header: nonpositive dimensions");
    if (static_cast<long long>(w) * h > 100'000'000LL)
        throw std::runtime_error("malformed PGM header: implausible dimensions");
    if (maxval <= 0 || maxval > 255)
        throw std::runtime_error("malformed PGM header: unsupported maxval (only 8-bit supported)");
    r.consume_single_separator();

    const auto data = r.remainder();
    const std::size_t need = static_cast<std::size_t>(w) * h;
    if (data.size() < need)
        throw std::runtime_error("truncated PGM: expected " + std::to_string(need) +
                                 " pixel bytes, got " + std::to_string(data.size()));

    BinaryMask mask(w, h);
    for (std::size_t i = 0; i < need; ++i)
        mask.pixels[i] = data[i] >= threshold ? 1 : 0;
    return mask;
}

std::vector<std::uint8_t> save_mask(const BinaryMask& mask) {
    if (mask.width <= 0 || mask.height <= 0 ||
        mask.pixels.size() != static_cast<std::size_t>(mask.width) * mask.height)
        throw std::invalid_argument("save_mask: invalid mask");
    char header[64];
    const int n = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", mask.width, mask.height);
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(n) + mask.pixels.size());
    out.insert(out.end(), header, header + n);
    for (std::uint8_t p : mask.pixels)
        out.push_back(p ? 255 : 0);
    return out;
}

BinaryMask load_mask_file(const std::filesystem::path& path, int threshold) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open mask file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return load_mask(bytes, threshold);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void save_mask_file(const BinaryMask& mask, const std::filesystem::path& path) {
    const auto bytes = save_mask(mask);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error("failed to write mask file: " + path.string());
}

BinaryMask degrade(const BinaryMask& mask, const DegradeSpec& spec) {
    spec.validate();
    std::mt19937_64 gen(spec.seed);

    // 1. Morphological dilation with a Euclidean disc.
    BinaryMask out = mask;
    if (spec.dilation_radius > 0 && mask.foreground_count() > 0) {
        const int r = spec.dilation_radius;
        std::vector<std::pair<int, int>> offsets;
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx)
                if (dx * dx + dy * dy <= r * r) offsets.emplace_back(dx, dy);
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                if (!mask.at(x, y)) continue;
                for (auto [dx, dy] : offsets) {
                    const int nx = x + dx, ny = y + dy;
                    if (out.in_bounds(nx, ny)) out.set(nx, ny, true);
                }
            }
        }
    }

    // 2. Block dropout: blocks tile the image; a selected block is cleared.
    if (spec.dropout_probability > 0.0) {
        const int bs = spec.dropout_block_size;
        for (int by = 0; by < out.height; by += bs) {
            for (int bx = 0; bx < out.width; bx += bs) {
                if (unit_uniform(gen) >= spec.dropout_probability) continue;
                const int y_end = std::min(by + bs, out.height);
                const int x_end = std::min(bx + bs, out.width);
                for (int y = by; y < y_end; ++y)
                    for (int x = bx; x < x_end; ++x) out.set(x, y, false);
            }
        }
    }

    // 3. Speckle: background pixels flip to foreground. One draw per pixel
    //    keeps the RNG stream independent of mask content.
    if (spec.speckle_probability > 0.0) {
        for (std::uint8_t& p : out.pixels) {
            const bool flip = unit_uniform(gen) < spec.speckle_probability;
            if (flip && p == 0) p = 1;
        }
    }

    return out;
}

}  // namespace rowtsm
