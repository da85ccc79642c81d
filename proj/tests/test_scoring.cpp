#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"

#include "nbs/error.hpp"
#include "nbs/scoring.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_fixture.hpp"

using namespace nbs;

namespace {

Crosswalk unl_crosswalk() {
    return Crosswalk({{"UNL", "Water scarcity", "water_management", false},
                      {"UNL", "Flood management", "water_management", false},
                      {"UNL", "Water pollution", "water_management", false},
                      {"GU", "Health", "public_health_wellbeing", true}});
}

}  // namespace

TEST_CASE("map_to_baseline") {
    const auto cw = unl_crosswalk();
    const auto a = map_to_baseline({"UNL", "x", "Flood management", 1}, cw);
    CHECK(a.facet == "water_management");
    CHECK(a.value == 1);
    CHECK(map_to_baseline({"UNL", "x", "Water scarcity", 0}, cw).value == 0);
    try {
        (void)map_to_baseline({"GU", "x", "unknown label", 1}, cw);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("no crosswalk") != std::string::npos);
    }
    CHECK_THROWS_AS(map_to_baseline({"UNL", "x", "Water scarcity", 2}, cw), DomainError);
}

TEST_CASE("normalize_project averages crosswalked sub-facets") {
    const auto cw = unl_crosswalk();
    const std::vector<RawScoreRecord> two_of_three{{"UNL", "x", "Water scarcity", 1},
                                                   {"UNL", "x", "Flood management", 1},
                                                   {"UNL", "x", "Water pollution", 0}};
    CHECK(normalize_project("UNL", "NBS1", "water_management", two_of_three, cw).value.value() ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    const std::vector<RawScoreRecord> one{{"UNL", "x", "Flood management", 1}};
    CHECK(*normalize_project("UNL", "NBS1", "water_management", one, cw).value == 1.0);
    const std::vector<RawScoreRecord> zeros{{"UNL", "x", "Water scarcity", 0},
                                            {"UNL", "x", "Flood management", 0},
                                            {"UNL", "x", "Water pollution", 0}};
    CHECK(*normalize_project("UNL", "NBS1", "water_management", zeros, cw).value == 0.0);
    CHECK_FALSE(normalize_project("UNL", "NBS1", "water_management", {}, cw).value.has_value());

    const std::vector<RawScoreRecord> mixed{{"UNL", "x", "Water scarcity", 1}, {"GU", "x", "Health", 1}};
    CHECK_THROWS_AS(normalize_project("UNL", "NBS1", "water_management", mixed, cw), DomainError);
}

TEST_CASE("cross_scores takes the unweighted project mean") {
    const std::vector<NormalizedScore> s{{"P1", "NBS1", "f", 1.0},
                                         {"P2", "NBS1", "f", 0.5},
                                         {"P1", "NBS2", "f", 1.0},
                                         {"P1", "NBS3", "f", 2.0 / 3.0},
                                         {"P2", "NBS3", "f", 1.0},
                                         {"P3", "NBS3", "f", 0.0},
                                         {"P1", "NBS4", "f", std::nullopt}};
    const auto m = cross_scores(s, {"NBS1", "NBS2", "NBS3", "NBS4"}, {"f"});
    CHECK(*m.cell("NBS1", "f") == 0.75);
    CHECK(*m.cell("NBS2", "f") == 1.0);
    CHECK(*m.cell("NBS3", "f") == doctest::Approx((2.0 / 3.0 + 1.0) / 3.0).epsilon(1e-12));
    CHECK_FALSE(m.cell("NBS4", "f").has_value());
    const std::vector<NormalizedScore> bad{{"P1", "NBS9", "f", 1.0}};
    CHECK_THROWS_AS(cross_scores(bad, {"NBS1"}, {"f"}), ValidationError);
}

TEST_CASE("full pipeline matches the brute-force oracle on 100 random fixtures") {
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 100; ++trial) {
        const auto fx = fixtures::random_fixture(rng);
        const auto m = compute_score_matrix(fx.catalogue, fx.records);
        const auto expected = oracle::crossed_scores(fixtures::to_oracle(fx.records), fx.catalogue.ids(),
                                                     fx.catalogue.facet_ids(), fx.membership, fx.crosswalk);
        for (std::size_t r = 0; r < m.row_count(); ++r)
            for (std::size_t c = 0; c < m.col_count(); ++c) {
                const auto it = expected.find({m.rows()[r], m.cols()[c]});
                const auto& got = m.at(r, c);
                REQUIRE(got.has_value() == (it != expected.end()));
                if (got) {
                    CHECK(std::abs(*got - it->second) <= 1e-12);
                    CHECK(*got >= 0.0);
                    CHECK(*got <= 1.0);
                }
            }

        // record order never matters
        auto shuffled = fx.records;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(compute_score_matrix(fx.catalogue, shuffled) == m);
    }
}

TEST_CASE("single-project binary data passes through unchanged") {
    Catalogue::Parts parts;
    parts.taxonomy = fixtures::small_taxonomy();
    parts.entries = {fixtures::entry("NBS1", "A", {{"P1", {"a"}}, {"P2", {"a2"}}}),
                     fixtures::entry("NBS2", "B1", {{"P1", {"b"}}, {"P2", {"b2"}}})};
    parts.facets = {fixtures::uc("u")};
    parts.crosswalk = {{"P1", "U", "u", false}};
    const auto cat = Catalogue::build(parts);
    const std::vector<RawScoreRecord> recs{{"P1", "a", "U", 1}, {"P1", "b", "U", 0}};
    const auto m = compute_score_matrix(cat, recs);
    CHECK(*m.cell("NBS1", "u") == 1.0);
    CHECK(*m.cell("NBS2", "u") == 0.0);

    // adding a contribution makes a Missing cell present
    const std::vector<RawScoreRecord> only_a{{"P1", "a", "U", 1}};
    CHECK_FALSE(compute_score_matrix(cat, only_a).cell("NBS2", "u").has_value());

    const std::vector<RawScoreRecord> stray{{"P1", "zzz", "U", 1}};
    CHECK_THROWS_AS(compute_score_matrix(cat, stray), DomainError);
}

TEST_CASE("median and facet summaries") {
    CHECK(median({0.2, 0.6, 1.0}) == doctest::Approx(0.6));
    CHECK(median({0.0, 1.0}) == 0.5);
    CHECK(median({1.0, 0.0, 0.5, 0.25}) == 0.375);
    CHECK_THROWS_AS(median({}), DomainError);

    ScoreMatrix m({"NBS1", "NBS2", "NBS3", "NBS4"}, {"a", "b"});
    m.at(0, 0) = 0.2;
    m.at(1, 0) = 1.0;
    m.at(2, 0) = 0.6;
    const auto s = facet_summary(m, "a");
    CHECK(s.median == doctest::Approx(0.6));
    CHECK(s.mean == doctest::Approx(0.6));
    CHECK(s.count_nonmissing == 3);
    try {
        (void)facet_summary(m, "b");
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("no data") != std::string::npos);
    }
    CHECK_THROWS_AS(facet_summary(m, "zz"), NotFoundError);
}

TEST_CASE("facet view collapses ES into category means") {
    Catalogue::Parts parts;
    parts.taxonomy = fixtures::small_taxonomy();
    parts.entries = {fixtures::entry("NBS1", "A", {{"P1", {"a"}}, {"P2", {"a2"}}})};
    parts.facets = {fixtures::uc("u"), fixtures::es("r1", EsCategory::Regulating), fixtures::es("r2", EsCategory::Regulating),
                    fixtures::es("r3", EsCategory::Regulating), fixtures::es("r4", EsCategory::Regulating),
                    fixtures::es("c1", EsCategory::Cultural)};
    const auto cat = Catalogue::build(parts);
    ScoreMatrix m({"NBS1"}, cat.facet_ids());
    m.at(0, 0) = 0.5;
    m.at(0, 1) = 1.0;
    m.at(0, 2) = 0.0;
    m.at(0, 4) = 1.0;
    const auto v = facet_view(m, cat);
    REQUIRE(v.cols() == std::vector<FacetId>{"u", "es_regulating", "es_cultural"});
    CHECK(*v.cell("NBS1", "u") == 0.5);
    CHECK(*v.cell("NBS1", "es_regulating") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK_FALSE(v.cell("NBS1", "es_cultural").has_value());
}

TEST_CASE("score matrix files round-trip exactly") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScoreMatrix m({"NBS1", "NBS2", "NBS10"}, {"a", "b", "c"});
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            if ((r + c) % 4 != 1) m.at(r, c) = u(rng) / 3.0;
    const auto dir = fixtures::temp_dir("matrix");
    write_score_matrix(dir / "m.tsv", m);
    CHECK(read_score_matrix(dir / "m.tsv") == m);

    std::vector<RawScoreRecord> recs{{"GU", "label a", "Health", 1}, {"TN", "label b", "Flood protection", 0}};
    write_raw_scores(dir / "raw.tsv", recs);
    const auto back = load_raw_scores(dir / "raw.tsv");
    REQUIRE(back.size() == 2);
    CHECK(back[1].project_facet_label == "Flood protection");
    CHECK(back[1].value == 0);

    fixtures::write_file(dir / "bad.tsv", "project\tsource_nbs_label\tproject_facet_label\tvalue\nGU\tx\ty\t3\n");
    CHECK_THROWS_AS(load_raw_scores(dir / "bad.tsv"), ParseError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("bundled scores cover the catalogue") {
    const auto cat = load_catalogue(fixtures::bundled_dir(), true);
    const auto m = compute_score_matrix(cat, load_raw_scores(fixtures::bundled_dir() / "raw_scores.tsv"));
    CHECK(m.row_count() == 32);
    CHECK(m.col_count() == 29);
    for (std::size_t r = 0; r < m.row_count(); ++r)
        for (std::size_t c = 0; c < m.col_count(); ++c)
            if (m.at(r, c)) {
                CHECK(*m.at(r, c) >= 0.0);
                CHECK(*m.at(r, c) <= 1.0);
            }
}
