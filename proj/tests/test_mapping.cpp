#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "pncm/mapping.hpp"

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

TEST_CASE("superposed constellation sizes and geometry") {
    Constellation pam4 = make_constellation(ModKind::Pam, 4);
    SuperposedConstellation sp = superpose(pam4);
    REQUIRE(sp.position_count() == 7);
    for (int j = 0; j < 7; ++j)
        CHECK(sp.points[(std::size_t)j].real() ==
              Catch::Approx((2.0 * j - 6.0) * pam4.scale).margin(1e-12));

    Constellation q16 = make_constellation(ModKind::QamSquare, 16);
    CHECK(superpose(q16).position_count() == 49);

    Constellation bpsk = make_constellation(ModKind::Pam, 2);
    SuperposedConstellation sb = superpose(bpsk);
    REQUIRE(sb.position_count() == 3);
    CHECK(sb.points[0].real() == Catch::Approx(-2.0 * bpsk.scale));
    CHECK(sb.points[1].real() == Catch::Approx(0.0).margin(1e-12));
    CHECK(sb.points[2].real() == Catch::Approx(2.0 * bpsk.scale));
}

TEST_CASE("every ordered pair lands on exactly one superposed point") {
    for (auto [kind, m] : supported()) {
        Constellation c = make_constellation(kind, m);
        SuperposedConstellation sp = superpose(c);
        std::size_t total = 0;
        for (const auto& pairs : sp.origin_pairs) {
            std::set<std::pair<int, int>> uniq;
            for (auto [a, b] : pairs) uniq.insert({a, b});
            CHECK(uniq.size() == pairs.size());
            total += pairs.size();
        }
        CHECK(total == (std::size_t)c.size * (std::size_t)c.size);
        // superposed point = sum of the pair's points
        for (std::size_t pos = 0; pos < sp.position_count(); ++pos)
            for (auto [a, b] : sp.origin_pairs[pos])
                CHECK(std::abs(sp.points[pos] - (c.points[(std::size_t)a] +
                                                 c.points[(std::size_t)b])) < 1e-9);
    }
}

TEST_CASE("modular coded-symbol arithmetic") {
    CHECK(coded_symbol_pam(5, 4) == 1);
    CHECK(coded_symbol_pam(0, 4) == 0);
    CHECK(coded_symbol_pam(6, 4) == 2);
    CHECK_THROWS_AS(coded_symbol_pam(7, 4), std::out_of_range);

    CHECK(coded_symbol_qam(4, 3, 4) == std::array<int, 2>{0, 3});
    CHECK(coded_symbol_qam(0, 0, 6) == std::array<int, 2>{0, 0});
    CHECK(coded_symbol_qam(6, 6, 4) == std::array<int, 2>{2, 2});
    CHECK_THROWS_AS(coded_symbol_qam(7, 0, 4), std::out_of_range);
}

TEST_CASE("extend_to_square") {
    auto [l8, e8] = extend_to_square(make_constellation(ModKind::QamCross, 8));
    CHECK(l8 == 3);
    CHECK(e8.points.size() == 9);

    auto [l32, e32] = extend_to_square(make_constellation(ModKind::QamCross, 32));
    CHECK(l32 == 6);
    CHECK(e32.points.size() == 36);

    Constellation q16 = make_constellation(ModKind::QamSquare, 16);
    auto [l16, e16] = extend_to_square(q16);
    CHECK(l16 == 4);
    CHECK(e16.points == q16.points);

    CHECK_THROWS_AS(extend_to_square(make_constellation(ModKind::Pam, 4)),
                    std::invalid_argument);
}

TEST_CASE("mapping table construction") {
    MappingTable t4 = build_mapping_table(make_constellation(ModKind::Pam, 4));
    REQUIRE(t4.coded.size() == 7);
    CHECK(t4.coded == std::vector<int>{0, 1, 2, 3, 0, 1, 2});
    CHECK(t4.coded_alphabet_size == 4);

    MappingTable t16 = build_mapping_table(make_constellation(ModKind::QamSquare, 16));
    CHECK(t16.coded.size() == 49);
    CHECK(t16.coded_alphabet_size == 16);

    MappingTable t8 = build_mapping_table(make_constellation(ModKind::QamCross, 8));
    CHECK(t8.coded_alphabet_size == 9);
    CHECK(t8.bounding_axis == 3);
    CHECK(t8.coded_word_bits == 4);
}

TEST_CASE("table construction touches each superposed position exactly once") {
    for (auto [kind, m] : supported()) {
        Constellation c = make_constellation(kind, m);
        MappingTable t = build_mapping_table(c);
        std::size_t expect;
        if (kind == ModKind::Pam)
            expect = (std::size_t)(2 * m - 1);
        else {
            int lx = t.bounding_axis;
            expect = (std::size_t)(2 * lx - 1) * (std::size_t)(2 * lx - 1);
        }
        CHECK(t.build_ops == expect);
        CHECK(t.superposed.position_count() == expect);
    }
}

TEST_CASE("coded alphabet sizes") {
    for (auto [kind, m] : supported()) {
        MappingTable t = build_mapping_table(make_constellation(kind, m));
        if (kind == ModKind::QamCross)
            CHECK(t.coded_alphabet_size == t.bounding_axis * t.bounding_axis);
        else
            CHECK(t.coded_alphabet_size == m);
    }
}

TEST_CASE("expected-symbol decoding") {
    MappingTable t4 = build_mapping_table(make_constellation(ModKind::Pam, 4));
    CHECK(decode_expected(t4, 1, 2) == 3);  // (1 - 2) mod 4

    // defining property, exhaustively, in both directions
    for (auto [kind, m] : supported()) {
        MappingTable t = build_mapping_table(make_constellation(kind, m));
        for (int s1 = 0; s1 < m; ++s1) {
            for (int s2 = 0; s2 < m; ++s2) {
                int code = coded_of_pair(t, s1, s2);
                REQUIRE(decode_expected(t, code, s1) == s2);
                REQUIRE(decode_expected(t, code, s2) == s1);
            }
        }
    }

    CHECK_THROWS_AS(decode_expected(t4, 4, 0), std::out_of_range);
    CHECK_THROWS_AS(decode_expected(t4, 0, 4), std::out_of_range);
}

TEST_CASE("corrupted coded symbols can land on extension-only points") {
    MappingTable t = build_mapping_table(make_constellation(ModKind::QamCross, 32));
    // find a known symbol and coded word whose difference indexes a removed corner
    const Constellation& c = t.base();
    int known = -1;
    for (int i = 0; i < c.size; ++i)
        if (c.axis[(std::size_t)i][0] == 1 && c.axis[(std::size_t)i][1] == 1) known = i;
    REQUIRE(known >= 0);
    int coded = (1 % 6) * 6 + (1 % 6);  // decodes to grid (0,0), a removed corner
    CHECK_FALSE(decode_expected(t, coded, known).has_value());
}

TEST_CASE("exclusive law holds for every supported modular table") {
    for (auto [kind, m] : supported()) {
        MappingTable t = build_mapping_table(make_constellation(kind, m));
        ExclusiveLawReport rep = verify_exclusive_law(t);
        INFO("kind=" << (int)kind << " m=" << m << " cex=" << rep.counterexample);
        CHECK(rep.pairwise_ok);
        CHECK(rep.window_ok);
    }
}

TEST_CASE("xor labeling on 4-PAM violates the exclusive law") {
    MappingTable t = build_mapping_table(make_constellation(ModKind::Pam, 4),
                                         MappingRule::XorLabels);
    ExclusiveLawReport rep = verify_exclusive_law(t);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.counterexample.empty());

    CHECK_THROWS_AS(build_mapping_table(make_constellation(ModKind::QamCross, 8),
                                        MappingRule::XorLabels),
                    std::invalid_argument);
}

TEST_CASE("pairwise and window checks agree on corrupted PAM tables") {
    std::mt19937_64 rng(7);
    for (int m : {2, 4, 8}) {
        MappingTable t = build_mapping_table(make_constellation(ModKind::Pam, m));
        std::uniform_int_distribution<int> pos(0, 2 * m - 2);
        std::uniform_int_distribution<int> val(0, m - 1);
        for (int trial = 0; trial < 200; ++trial) {
            MappingTable broken = t;
            broken.coded[(std::size_t)pos(rng)] = val(rng);
            ExclusiveLawReport rep = verify_exclusive_law(broken);
            INFO("m=" << m << " trial=" << trial);
            REQUIRE(rep.pairwise_ok == rep.window_ok);
        }
    }
}

TEST_CASE("coded stream overhead") {
    CHECK(coded_stream_overhead(build_mapping_table(make_constellation(ModKind::Pam, 4))) == 1.0);
    CHECK(coded_stream_overhead(build_mapping_table(make_constellation(ModKind::QamSquare, 64))) ==
          1.0);
    CHECK(coded_stream_overhead(build_mapping_table(make_constellation(ModKind::QamCross, 8))) ==
          Catch::Approx(4.0 / 3.0));
    CHECK(coded_stream_overhead(build_mapping_table(make_constellation(ModKind::QamCross, 32))) ==
          Catch::Approx(6.0 / 5.0));
    CHECK(coded_stream_overhead(build_mapping_table(make_constellation(ModKind::QamCross, 128))) ==
          Catch::Approx(8.0 / 7.0));
}
