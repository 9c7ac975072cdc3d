#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <random>
#include <set>

#include "pncm/constellation.hpp"

using namespace pncm;

namespace {

const std::vector<std::pair<ModKind, int>>& supported() {
    static const std::vector<std::pair<ModKind, int>> v = {
        {ModKind::Pam, 2},        {ModKind::Pam, 4},        {ModKind::Pam, 8},
        {ModKind::Pam, 16},       {ModKind::QamSquare, 4},  {ModKind::QamSquare, 16},
        {ModKind::QamSquare, 64}, {ModKind::QamSquare, 256},{ModKind::QamCross, 8},
        {ModKind::QamCross, 32},  {ModKind::QamCross, 128}};
    return v;
}

} // namespace

TEST_CASE("4-PAM grid and energy normalization") {
    Constellation c = make_constellation(ModKind::Pam, 4, Labeling::Binary, 1.0);
    double s = 1.0 / std::sqrt(5.0);  // mean of {9,1,1,9} is 5
    REQUIRE(c.scale == Catch::Approx(s).epsilon(1e-14));
    REQUIRE(c.points.size() == 4);
    CHECK(c.points[0].real() == Catch::Approx(-3.0 * s));
    CHECK(c.points[1].real() == Catch::Approx(-1.0 * s));
    CHECK(c.points[2].real() == Catch::Approx(1.0 * s));
    CHECK(c.points[3].real() == Catch::Approx(3.0 * s));
    CHECK(c.spacing() == Catch::Approx(s));
}

TEST_CASE("cross constellations have the stated bounding grids") {
    Constellation c8 = make_constellation(ModKind::QamCross, 8);
    CHECK(c8.points.size() == 8);
    CHECK(c8.per_axis == 3);
    CHECK(c8.index_at_grid(1, 1) == -1);  // removed center

    Constellation c32 = make_constellation(ModKind::QamCross, 32);
    CHECK(c32.points.size() == 32);
    CHECK(c32.per_axis == 6);
    for (auto [i, q] : {std::pair{0, 0}, {0, 5}, {5, 0}, {5, 5}})
        CHECK(c32.index_at_grid(i, q) == -1);

    Constellation c128 = make_constellation(ModKind::QamCross, 128);
    CHECK(c128.points.size() == 128);
    CHECK(c128.per_axis == 12);
    CHECK(c128.index_at_grid(0, 0) == -1);
    CHECK(c128.index_at_grid(1, 1) == -1);
    CHECK(c128.index_at_grid(10, 11) == -1);
    CHECK(c128.index_at_grid(2, 0) >= 0);
}

TEST_CASE("modulate returns grid points") {
    Constellation c = make_constellation(ModKind::Pam, 4);
    CHECK(modulate(c, 0).real() == Catch::Approx(-3.0 * c.scale));
    CHECK(modulate(c, 3).real() == Catch::Approx(3.0 * c.scale));
    CHECK_THROWS_AS(modulate(c, 4), std::out_of_range);
    CHECK_THROWS_AS(modulate(c, -1), std::out_of_range);

    Constellation q = make_constellation(ModKind::QamSquare, 16);
    for (int i = 0; i < q.size; ++i) {
        double re = modulate(q, i).real() / q.scale;
        double im = modulate(q, i).imag() / q.scale;
        CHECK(std::abs(std::abs(re) - 1.0) * std::abs(std::abs(re) - 3.0) ==
              Catch::Approx(0.0).margin(1e-12));
        CHECK(std::abs(std::abs(im) - 1.0) * std::abs(std::abs(im) - 3.0) ==
              Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("demodulate: exact points, midpoint tie-break, small noise") {
    for (auto [kind, m] : supported()) {
        Constellation c = make_constellation(kind, m);
        for (int i = 0; i < c.size; ++i) CHECK(demodulate(c, c.points[(std::size_t)i]) == i);
    }

    Constellation pam = make_constellation(ModKind::Pam, 4);
    CHECK(demodulate(pam, cpoint(-2.0 * pam.scale, 0.0)) == 0);  // tie between 0 and 1

    CHECK_THROWS_AS(demodulate(pam, cpoint(std::nan(""), 0.0)), std::invalid_argument);

    // noise far below half the decision distance never flips a symbol
    std::mt19937_64 rng(42);
    for (auto [kind, m] : {std::pair{ModKind::QamSquare, 16}, {ModKind::Pam, 8},
                           {ModKind::QamCross, 32}}) {
        Constellation c = make_constellation(kind, m);
        std::normal_distribution<double> g(0.0, 0.1 * c.spacing());
        std::uniform_int_distribution<int> sym(0, c.size - 1);
        for (int t = 0; t < 1000; ++t) {
            int tx = sym(rng);
            cpoint y = c.points[(std::size_t)tx] + cpoint(g(rng), g(rng));
            REQUIRE(demodulate(c, y) == tx);
        }
    }
}

TEST_CASE("bit labels") {
    Constellation gray = make_constellation(ModKind::Pam, 4, Labeling::Gray);
    CHECK(bits_of(gray, 0) == "00");
    CHECK(bits_of(gray, 1) == "01");
    CHECK(bits_of(gray, 2) == "11");
    CHECK(bits_of(gray, 3) == "10");

    Constellation bin = make_constellation(ModKind::Pam, 4, Labeling::Binary);
    CHECK(bits_of(bin, 2) == "10");

    Constellation cross = make_constellation(ModKind::QamCross, 8);
    CHECK(bits_of(cross, 7) == "111");
    CHECK_THROWS_AS(bits_of(cross, 8), std::out_of_range);
}

TEST_CASE("invariants over all supported constellations") {
    for (auto [kind, m] : supported()) {
        for (Labeling lab : {Labeling::Binary, Labeling::Gray}) {
            Constellation c = make_constellation(kind, m, lab, 2.5);
            INFO("kind=" << (int)kind << " m=" << m);

            // all points and labels distinct
            std::set<std::pair<double, double>> pts;
            std::set<std::uint32_t> labs;
            for (int i = 0; i < c.size; ++i) {
                pts.insert({c.points[(std::size_t)i].real(), c.points[(std::size_t)i].imag()});
                labs.insert(c.labels[(std::size_t)i]);
            }
            CHECK(pts.size() == (std::size_t)c.size);
            CHECK(labs.size() == (std::size_t)c.size);

            // declared energy within 1e-12 relative
            double e = 0.0;
            for (auto p : c.points) e += std::norm(p);
            e /= c.size;
            CHECK(std::abs(e - 2.5) / 2.5 < 1e-12);

            // noiseless round trip
            for (int i = 0; i < c.size; ++i) CHECK(demodulate(c, modulate(c, i)) == i);
        }
    }
}

TEST_CASE("gray labels of axis-adjacent points differ in one bit") {
    for (auto [kind, m] : {std::pair{ModKind::Pam, 4}, {ModKind::Pam, 16},
                           {ModKind::QamSquare, 16}, {ModKind::QamSquare, 64}}) {
        Constellation c = make_constellation(kind, m, Labeling::Gray);
        for (int i = 0; i < c.per_axis; ++i) {
            for (int q = 0; q < (kind == ModKind::Pam ? 1 : c.per_axis); ++q) {
                int a = c.index_at_grid(i, q);
                for (auto [di, dq] : {std::pair{1, 0}, {0, 1}}) {
                    int b = c.index_at_grid(i + di, q + dq);
                    if (a < 0 || b < 0) continue;
                    CHECK(std::popcount(c.labels[(std::size_t)a] ^ c.labels[(std::size_t)b]) == 1);
                }
            }
        }
    }
}

TEST_CASE("cross constellations: distinct axis coordinates bounded by the grid") {
    for (int m : {8, 32, 128}) {
        Constellation c = make_constellation(ModKind::QamCross, m);
        std::set<int> is, qs;
        for (auto [i, q] : c.axis) {
            is.insert(i);
            qs.insert(q);
        }
        CHECK((int)is.size() <= c.per_axis);
        CHECK((int)qs.size() <= c.per_axis);
        CHECK(((int)is.size() == c.per_axis || (int)qs.size() == c.per_axis));
    }
}

TEST_CASE("unsupported combinations are rejected with a diagnostic") {
    CHECK_THROWS_WITH(make_constellation(ModKind::Pam, 3),
                      Catch::Matchers::ContainsSubstring("2, 4, 8, 16"));
    CHECK_THROWS_WITH(make_constellation(ModKind::QamSquare, 8),
                      Catch::Matchers::ContainsSubstring("4, 16, 64, 256"));
    CHECK_THROWS_WITH(make_constellation(ModKind::QamCross, 16),
                      Catch::Matchers::ContainsSubstring("8, 32, 128"));
    CHECK_THROWS_AS(make_constellation(ModKind::Pam, 4, Labeling::Binary, 0.0),
                    std::invalid_argument);
}

TEST_CASE("modulation id parsing") {
    CHECK(parse_modulation_id("bpsk") == std::pair{ModKind::Pam, 2});
    CHECK(parse_modulation_id("QPSK") == std::pair{ModKind::QamSquare, 4});
    CHECK(parse_modulation_id("pam8") == std::pair{ModKind::Pam, 8});
    CHECK(parse_modulation_id("qam32") == std::pair{ModKind::QamCross, 32});
    CHECK(parse_modulation_id("qam256") == std::pair{ModKind::QamSquare, 256});
    CHECK_THROWS_AS(parse_modulation_id("qam7x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_modulation_id("ofdm"), std::invalid_argument);
}
