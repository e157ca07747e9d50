#include "doctest.h"

#include <random>
#include <string>

#include "rowtsm/mask.hpp"

using namespace rowtsm;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return {s.begin(), s.end()};
}

BinaryMask random_mask(std::mt19937& gen, int max_dim = 64) {
    std::uniform_int_distribution<int> dim(1, max_dim);
    std::uniform_int_distribution<int> bit(0, 1);
    BinaryMask m(dim(gen), dim(gen));
    for (auto& p : m.pixels) p = static_cast<std::uint8_t>(bit(gen));
    return m;
}

}  // namespace

TEST_CASE("load_mask threshold and shape") {
    auto bytes = bytes_of("P5\n2 2\n255\n");
    bytes.insert(bytes.end(), {255, 0, 0, 255});
    const BinaryMask m = load_mask(bytes);
    CHECK(m.width == 2);
    CHECK(m.height == 2);
    CHECK(m.at(0, 0));
    CHECK_FALSE(m.at(1, 0));
    CHECK_FALSE(m.at(0, 1));
    CHECK(m.at(1, 1));
}

TEST_CASE("load_mask threshold boundary at 128") {
    auto bytes = bytes_of("P5\n2 1\n255\n");
    bytes.insert(bytes.end(), {128, 127});
    const BinaryMask m = load_mask(bytes);
    CHECK(m.at(0, 0));
    CHECK_FALSE(m.at(1, 0));

    const BinaryMask strict = load_mask(bytes, 200);
    CHECK_FALSE(strict.at(0, 0));
}

TEST_CASE("load_mask accepts header comments and odd whitespace") {
    auto bytes = bytes_of("P5 # comment\n# full line\n 2\t1 # dims\n255\n");
    bytes.insert(bytes.end(), {200, 3});
    const BinaryMask m = load_mask(bytes);
    CHECK(m.width == 2);
    CHECK(m.at(0, 0));
    CHECK_FALSE(m.at(1, 0));
}

TEST_CASE("load_mask: all-zero 512x512 has no foreground") {
    auto bytes = bytes_of("P5\n512 512\n255\n");
    bytes.resize(bytes.size() + 512 * 512, 0);
    CHECK(load_mask(bytes).foreground_count() == 0);
}

TEST_CASE("load_mask rejects malformed input") {
    CHECK_THROWS_AS(load_mask(bytes_of("P6\n1 1\n255\nx")), std::runtime_error);
    CHECK_THROWS_AS(load_mask(bytes_of("P5\n1\n255\n")), std::runtime_error);
    CHECK_THROWS_AS(load_mask(bytes_of("P5\n2 2\n999\nabcd")), std::runtime_error);
    // truncated payload: 3 of 4 bytes
    auto bytes = bytes_of("P5\n2 2\n255\n");
    bytes.insert(bytes.end(), {1, 2, 3});
    CHECK_THROWS_WITH_AS(load_mask(bytes), doctest::Contains("truncated"), std::runtime_error);
}

TEST_CASE("save_mask emits canonical P5") {
    BinaryMask m(2, 2);
    m.set(0, 0, true);
    m.set(1, 1, true);
    const auto bytes = save_mask(m);
    const std::string header(bytes.begin(), bytes.begin() + 11);
    CHECK(header == "P5\n2 2\n255\n");
    CHECK(bytes[11] == 255);
    CHECK(bytes[12] == 0);
    CHECK(bytes[13] == 0);
    CHECK(bytes[14] == 255);
}

TEST_CASE("save_mask: 512x512 all-foreground payload") {
    const BinaryMask m(512, 512, true);
    const auto bytes = save_mask(m);
    const std::string header = "P5\n512 512\n255\n";
    REQUIRE(bytes.size() == header.size() + 512 * 512);
    std::size_t count255 = 0;
    for (std::size_t i = header.size(); i < bytes.size(); ++i) count255 += bytes[i] == 255;
    CHECK(count255 == 512 * 512);
}

TEST_CASE("mask round-trip: load(save(m)) == m") {
    std::mt19937 gen(123);
    for (int i = 0; i < 50; ++i) {
        const BinaryMask m = random_mask(gen);
        CHECK(load_mask(save_mask(m)) == m);
    }
}

TEST_CASE("save(load(b)) is the canonical re-encoding of any valid P5") {
    std::mt19937 gen(321);
    std::uniform_int_distribution<int> dim(1, 32);
    std::uniform_int_distribution<int> gray(0, 255);
    for (int i = 0; i < 30; ++i) {
        const int w = dim(gen), h = dim(gen);
        std::string header = "P5";
        if (i % 2) header += " # c";
        header += "\n" + std::to_string(w) + (i % 3 ? " " : "\t") + std::to_string(h) + "\n255\n";
        auto bytes = bytes_of(header);
        std::vector<std::uint8_t> payload(static_cast<std::size_t>(w) * h);
        for (auto& p : payload) p = static_cast<std::uint8_t>(gray(gen));
        bytes.insert(bytes.end(), payload.begin(), payload.end());

        // Independently constructed canonical form.
        auto expect = bytes_of("P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n");
        for (std::uint8_t p : payload) expect.push_back(p >= 128 ? 255 : 0);

        CHECK(save_mask(load_mask(bytes)) == expect);
    }
}

TEST_CASE("degrade: identity spec returns the input") {
    std::mt19937 gen(7);
    const BinaryMask m = random_mask(gen, 40);
    const DegradeSpec identity{};
    CHECK(degrade(m, identity) == m);
    CHECK(degrade(m, identity).foreground_count() == m.foreground_count());
}

TEST_CASE("degrade: deterministic in (mask, spec)") {
    std::mt19937 gen(8);
    const BinaryMask m = random_mask(gen, 48);
    DegradeSpec spec;
    spec.dropout_probability = 0.3;
    spec.speckle_probability = 0.05;
    spec.dilation_radius = 1;
    spec.seed = 99;
    const BinaryMask a = degrade(m, spec);
    const BinaryMask b = degrade(m, spec);
    CHECK(a == b);
    CHECK(a.width == m.width);
    CHECK(a.height == m.height);

    spec.seed = 100;
    CHECK(degrade(m, spec) != a);  // different seed, different noise
}

TEST_CASE("degrade: full-image dropout clears every 8x8 mask") {
    DegradeSpec spec;
    spec.dropout_block_size = 8;
    spec.dropout_probability = 1.0;
    // all single-pixel masks
    for (int i = 0; i < 64; ++i) {
        BinaryMask m(8, 8);
        m.pixels[static_cast<std::size_t>(i)] = 1;
        CHECK(degrade(m, spec).foreground_count() == 0);
    }
    std::mt19937 gen(9);
    for (int i = 0; i < 20; ++i) {
        const BinaryMask m = random_mask(gen, 8);
        DegradeSpec whole = spec;
        whole.dropout_block_size = std::max(m.width, m.height);
        CHECK(degrade(m, whole).foreground_count() == 0);
    }
}

TEST_CASE("degrade: dilation only grows the foreground") {
    std::mt19937 gen(10);
    const BinaryMask m = random_mask(gen, 32);
    DegradeSpec spec;
    spec.dilation_radius = 2;
    const BinaryMask d = degrade(m, spec);
    REQUIRE(d.width == m.width);
    for (std::size_t i = 0; i < m.pixels.size(); ++i)
        if (m.pixels[i]) CHECK(d.pixels[i]);
    CHECK(d.foreground_count() >= m.foreground_count());
}

TEST_CASE("degrade: speckle probability 1 fills the background") {
    BinaryMask m(16, 16);
    m.set(3, 3, true);
    DegradeSpec spec;
    spec.speckle_probability = 1.0;
    CHECK(degrade(m, spec).foreground_count() == 16 * 16);
}

TEST_CASE("degrade validates its spec") {
    const BinaryMask m(4, 4);
    DegradeSpec spec;
    spec.dropout_probability = 1.5;
    CHECK_THROWS_AS(degrade(m, spec), std::invalid_argument);
    spec = DegradeSpec{};
    spec.dropout_block_size = 0;
    CHECK_THROWS_AS(degrade(m, spec), std::invalid_argument);
}

TEST_CASE("mask file round-trip") {
    std::mt19937 gen(11);
    const BinaryMask m = random_mask(gen, 24);
    const auto path = std::filesystem::temp_directory_path() / "rowtsm_test_mask.pgm";
    save_mask_file(m, path);
    CHECK(load_mask_file(path) == m);
    std::filesystem::remove(path);
}
