#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "nbs/catalogue.hpp"
#include "nbs/error.hpp"
#include "nbs/tsv.hpp"
#include "support/fixtures.hpp"

using namespace nbs;

TEST_CASE("tsv parsing skips comments and tracks source lines") {
    const auto t = TsvTable::parse("# comment\na\tb\n\n1\tx\n# more\n2\t\n", "mem.tsv");
    REQUIRE(t.rows().size() == 2);
    CHECK(t.rows()[0].line == 4);
    CHECK(t.rows()[1].line == 6);
    CHECK(t.integer(t.rows()[1], t.column("a")) == 2);
    CHECK(t.cell(t.rows()[1], t.column("b")).empty());
    CHECK_THROWS_AS(t.column("zzz"), ParseError);
}

TEST_CASE("tsv numeric errors name file, line and field") {
    const auto t = TsvTable::parse("n\tv\nNBS1\tabc\n", "bad.tsv");
    try {
        (void)t.real(t.rows()[0], t.column("v"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.field() == "v");
        CHECK(std::string(e.what()).find("bad.tsv:2") != std::string::npos);
    }
}

TEST_CASE("number formatting") {
    CHECK(format_sig(1.0 / 3.0) == "0.333333333");
    CHECK(format_sig(0.5) == "0.5");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) / 7.0;
        CHECK(std::stod(format_roundtrip(x)) == x);
    }
}

TEST_CASE("natural ordering of ids") {
    CHECK(natural_less("NBS2", "NBS10"));
    CHECK_FALSE(natural_less("NBS10", "NBS2"));
    CHECK(natural_less("NBS1", "NBS2"));
    CHECK_FALSE(natural_less("NBS3", "NBS3"));
}

TEST_CASE("bundled catalogue loads with the expected cardinalities") {
    const auto cat = load_catalogue(fixtures::bundled_dir(), true);
    CHECK(cat.entries().size() == 32);
    CHECK(cat.facet_ids(FacetKind::UrbanChallenge).size() == 10);
    CHECK(cat.facet_ids(FacetKind::EcosystemService).size() == 19);
    CHECK(cat.ids().front() == "NBS1");
    CHECK(cat.ids().back() == "NBS32");
    CHECK(cat.at("NBS17").final_name == "Large urban park");
    CHECK_THROWS_AS(cat.at("NBS99"), NotFoundError);
    for (const auto& f : cat.facets()) CHECK(f.es_category.has_value() == (f.kind == FacetKind::EcosystemService));
}

TEST_CASE("taxonomy counts and partition") {
    const auto cat = load_catalogue(fixtures::bundled_dir(), true);
    CHECK(cat.taxonomy_members("NBS_u").size() == 23);
    CHECK(cat.taxonomy_members("NBS_tu").size() == 14);
    CHECK(cat.taxonomy_members("NBS_su").size() == 9);
    CHECK(cat.taxonomy_members("NBS_i").size() == 9);
    CHECK_THROWS_AS(cat.taxonomy_members("NBS_x"), NotFoundError);

    std::multiset<std::string> seen;
    for (const auto& leaf : cat.taxonomy().leaves())
        for (const auto& id : cat.taxonomy_members(leaf)) seen.insert(id);
    CHECK(seen.size() == 32);
    CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == 32);

    for (const auto& n : cat.taxonomy().nodes()) {
        CHECK_FALSE(n.question.empty());
        CHECK(n.level <= 3);
        CHECK(cat.taxonomy().path(n.code).size() == static_cast<std::size_t>(n.level));
    }
    const auto members = cat.taxonomy_members("NBS_u");
    CHECK(std::is_sorted(members.begin(), members.end(), [](const auto& a, const auto& b) { return natural_less(a, b); }));
}

TEST_CASE("classify follows the guiding questions") {
    const auto cat = load_catalogue(fixtures::bundled_dir(), true);
    const auto& tax = cat.taxonomy();
    const std::vector<bool> green_roof{true, true, false};
    CHECK(tax.classify(green_roof) == "NBS_thu");
    CHECK(cat.at("NBS11").taxonomy_leaf == "NBS_thu");
    const std::vector<bool> riverbank{false, true};
    CHECK(tax.classify(riverbank) == "NBS_ir");
    CHECK(cat.at("NBS28").taxonomy_leaf == "NBS_ir");
    const std::vector<bool> street_trees{true, false, true};
    CHECK(tax.classify(street_trees) == "NBS_sau");

    const std::vector<bool> incomplete{true, true};
    CHECK_THROWS_AS(tax.classify(incomplete), DomainError);
    const std::vector<bool> extra{false, true, true};
    CHECK_THROWS_AS(tax.classify(extra), DomainError);
}

TEST_CASE("every leaf is reachable and answers_for inverts classify") {
    const auto cat = load_catalogue(fixtures::bundled_dir(), true);
    const auto& tax = cat.taxonomy();
    std::set<std::string> reached;
    for (int len = 1; len <= 4; ++len)
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::vector<bool> answers;
            for (int i = 0; i < len; ++i) answers.push_back((bits >> i) & 1);
            try {
                reached.insert(tax.classify(answers));
            } catch (const DomainError&) {
            }
        }
    const auto leaves = tax.leaves();
    CHECK(reached == std::set<std::string>(leaves.begin(), leaves.end()));
    for (const auto& leaf : leaves) {
        const auto answers = tax.answers_for(leaf);
        CHECK(tax.classify(answers) == leaf);
        CHECK(tax.questions_asked(answers).size() == answers.size());
    }
}

TEST_CASE("spatial-unit park sits under the spatial branch") {
    const auto cat = load_catalogue(fixtures::bundled_dir(), true);
    const auto path = cat.taxonomy().path(cat.at("NBS17").taxonomy_leaf);
    REQUIRE(path.size() == 3);
    CHECK(path[0] == "NBS_u");
    CHECK(path[1] == "NBS_su");
}

namespace {

Catalogue::Parts small_parts() {
    Catalogue::Parts p;
    p.taxonomy = fixtures::small_taxonomy();
    p.entries = {fixtures::entry("NBS1", "A", {{"P1", {"one"}}, {"P2", {"uno"}}}),
                 fixtures::entry("NBS2", "B1", {{"P1", {"two"}}, {"P2", {"dos"}}})};
    p.facets = {fixtures::uc("u1"), fixtures::es("e1", EsCategory::Regulating)};
    p.crosswalk = {{"P1", "U one", "u1", false}, {"P2", "E one", "e1", false}};
    return p;
}

}  // namespace

TEST_CASE("catalogue validation rejects broken invariants") {
    CHECK_NOTHROW(Catalogue::build(small_parts()));

    auto dup = small_parts();
    dup.entries[1].id = "NBS1";
    CHECK_THROWS_AS(Catalogue::build(dup), ValidationError);

    auto inner = small_parts();
    inner.entries[1].taxonomy_leaf = "B";
    CHECK_THROWS_AS(Catalogue::build(inner), ValidationError);

    auto unknown_leaf = small_parts();
    unknown_leaf.entries[1].taxonomy_leaf = "Z";
    CHECK_THROWS_AS(Catalogue::build(unknown_leaf), ValidationError);

    auto one_project = small_parts();
    one_project.entries[0].project_labels.erase("P2");
    CHECK_THROWS_AS(Catalogue::build(one_project), ValidationError);

    auto es_no_cat = small_parts();
    es_no_cat.facets[1].es_category.reset();
    CHECK_THROWS_AS(Catalogue::build(es_no_cat), ValidationError);

    auto uc_with_cat = small_parts();
    uc_with_cat.facets[0].es_category = EsCategory::Cultural;
    CHECK_THROWS_AS(Catalogue::build(uc_with_cat), ValidationError);

    auto bad_cw = small_parts();
    bad_cw.crosswalk[0].baseline_facet = "nope";
    CHECK_THROWS_AS(Catalogue::build(bad_cw), ValidationError);

    auto dup_cw = small_parts();
    dup_cw.crosswalk.push_back({"P1", "U one", "e1", false});
    CHECK_THROWS_AS(Catalogue::build(dup_cw), ValidationError);

    auto counts = small_parts();
    counts.require_bundled_counts = true;
    CHECK_THROWS_AS(Catalogue::build(counts), ValidationError);

    auto orphan = small_parts();
    orphan.taxonomy.push_back({"C1", std::string("C"), 2, "q"});
    CHECK_THROWS_AS(Catalogue::build(orphan), ValidationError);

    auto deep = small_parts();
    deep.taxonomy.push_back({"B11", std::string("B1"), 3, "q"});
    deep.taxonomy.push_back({"B111", std::string("B11"), 4, "q"});
    CHECK_THROWS_AS(Catalogue::build(deep), ValidationError);

    auto no_question = small_parts();
    no_question.taxonomy[0].question.clear();
    CHECK_THROWS_AS(Catalogue::build(no_question), ValidationError);
}

TEST_CASE("dataset files with violations fail to load") {
    SUBCASE("duplicate id") {
        const auto dir = fixtures::copy_bundled("dup");
        auto text = fixtures::slurp(dir / "entries.jsonl");
        const auto pos = text.find("\"id\": \"NBS6\"");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 12, "\"id\": \"NBS5\"");
        fixtures::write_file(dir / "entries.jsonl", text);
        CHECK_THROWS_AS(load_catalogue(dir, true), ValidationError);
        std::filesystem::remove_all(dir);
    }
    SUBCASE("non-leaf mapping") {
        const auto dir = fixtures::copy_bundled("nonleaf");
        auto text = fixtures::slurp(dir / "entries.jsonl");
        const auto pos = text.find("\"taxonomy_leaf\": \"NBS_thu\"");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 26, "\"taxonomy_leaf\": \"NBS_tu\"");
        fixtures::write_file(dir / "entries.jsonl", text);
        CHECK_THROWS_AS(load_catalogue(dir, true), ValidationError);
        std::filesystem::remove_all(dir);
    }
    SUBCASE("malformed taxonomy level") {
        const auto dir = fixtures::copy_bundled("taxlevel");
        auto text = fixtures::slurp(dir / "taxonomy.tsv");
        const auto pos = text.find("NBS_ib\tNBS_i\t2");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 14, "NBS_ib\tNBS_i\tx");
        fixtures::write_file(dir / "taxonomy.tsv", text);
        CHECK_THROWS_AS(load_catalogue(dir, true), ParseError);
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("exclusion log uses the closed reason set") {
    const auto cat = load_catalogue(fixtures::bundled_dir(), true);
    CHECK_FALSE(cat.exclusions().empty());
    int benefit = 0, inspired = 0, intensive = 0, category = 0;
    for (const auto& x : cat.exclusions()) {
        benefit += x.reason == ExclusionReason::BenefitNotSolution;
        inspired += x.reason == ExclusionReason::InspiredNotEmploying;
        intensive += x.reason == ExclusionReason::TooIntensiveNotInNature;
        category += x.reason == ExclusionReason::CategoryNotSolution;
    }
    CHECK(benefit == 3);
    CHECK(inspired == 9);
    CHECK(intensive == 4);
    CHECK(category == 3);
    for (auto r : {ExclusionReason::BenefitNotSolution, ExclusionReason::NotCrossProject})
        CHECK(parse_exclusion_reason(to_string(r)) == r);
}
