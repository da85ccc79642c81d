#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nbs {

using NbsId = std::string;
using TaxonomyCode = std::string;
using FacetId = std::string;
using ProjectId = std::string;

enum class NameProvenance { Round1, Round2, CitationArbitration, ExpertOverride };
enum class FacetKind { UrbanChallenge, EcosystemService };
enum class EsCategory { Provisioning, Regulating, Cultural, Supporting };
enum class ExclusionReason {
    BenefitNotSolution,
    InspiredNotEmploying,
    PlanningManagementApproach,
    TooIntensiveNotInNature,
    CategoryNotSolution,
    NoAssessment,
    NotCrossProject,
};

inline constexpr std::array<EsCategory, 4> kEsCategories = {
    EsCategory::Provisioning, EsCategory::Regulating, EsCategory::Cultural, EsCategory::Supporting};

std::string_view to_string(NameProvenance v);
std::string_view to_string(FacetKind v);
std::string_view to_string(EsCategory v);
std::string_view to_string(ExclusionReason v);
std::optional<NameProvenance> parse_name_provenance(std::string_view s);
std::optional<FacetKind> parse_facet_kind(std::string_view s);
std::optional<EsCategory> parse_es_category(std::string_view s);
std::optional<ExclusionReason> parse_exclusion_reason(std::string_view s);

// Column id used for the per-category ES aggregate ("es_regulating", ...).
FacetId es_category_column(EsCategory c);

// Orders "NBS2" before "NBS10": common prefix compared lexically, trailing
// digits numerically.
bool natural_less(std::string_view a, std::string_view b);

struct NaturalLess {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const { return natural_less(a, b); }
};

struct NbsEntry {
    NbsId id;
    std::string final_name;
    std::vector<std::string> aliases;
    std::string description;
    TaxonomyCode taxonomy_leaf;
    bool inferred_leaf = false;
    std::map<ProjectId, std::vector<std::string>> project_labels;
    NameProvenance name_provenance = NameProvenance::Round1;
};

struct TaxonomyNode {
    TaxonomyCode code;
    std::optional<TaxonomyCode> parent;
    int level = 1;
    std::string question;
};

struct FacetDef {
    FacetId id;
    FacetKind kind = FacetKind::UrbanChallenge;
    std::optional<EsCategory> es_category;
    std::string label;
};

struct CrosswalkRule {
    ProjectId project;
    std::string project_facet_label;
    FacetId baseline_facet;
    bool inferred = false;
};

struct ExclusionRecord {
    std::string item_name;
    ProjectId project;
    ExclusionReason reason = ExclusionReason::NoAssessment;
};

// Three-level classification forest. Sibling order is significant: when
// classifying, siblings are offered in order and the first "yes" wins; the
// last sibling is taken when every earlier one was answered "no".
class Taxonomy {
public:
    Taxonomy() = default;
    explicit Taxonomy(std::vector<TaxonomyNode> nodes);  // validates

    const std::vector<TaxonomyNode>& nodes() const { return nodes_; }
    const TaxonomyNode* find(std::string_view code) const;
    const TaxonomyNode& at(std::string_view code) const;  // NotFoundError
    std::vector<TaxonomyCode> roots() const;
    std::vector<TaxonomyCode> children(std::string_view code) const;
    bool is_leaf(std::string_view code) const;
    std::vector<TaxonomyCode> leaves() const;
    // Root-to-node codes.
    std::vector<TaxonomyCode> path(std::string_view code) const;
    bool descends_from(std::string_view code, std::string_view ancestor) const;
    // Ancestor (or self) at the given level.
    TaxonomyCode ancestor_at_level(std::string_view code, int level) const;

    TaxonomyCode classify(const std::vector<bool>& answers) const;
    // Answer sequence that classify() maps onto `leaf`.
    std::vector<bool> answers_for(std::string_view leaf) const;
    // Questions classify() would ask for the given answers, in order.
    std::vector<std::string> questions_asked(const std::vector<bool>& answers) const;

private:
    TaxonomyCode descend(const std::vector<bool>& answers, std::vector<std::string>* asked) const;

    std::vector<TaxonomyNode> nodes_;
    std::unordered_map<std::string, std::size_t> index_;
};

class Crosswalk {
public:
    Crosswalk() = default;
    explicit Crosswalk(std::vector<CrosswalkRule> rules);  // validates uniqueness

    const std::vector<CrosswalkRule>& rules() const { return rules_; }
    const CrosswalkRule* find(std::string_view project, std::string_view label) const;

private:
    std::vector<CrosswalkRule> rules_;
    std::map<std::pair<std::string, std::string>, std::size_t, std::less<>> index_;
};

// Immutable, validated view of the NBS list with its classification,
// facet baseline, project crosswalk and exclusion log.
class Catalogue {
public:
    struct Parts {
        std::vector<NbsEntry> entries;
        std::vector<TaxonomyNode> taxonomy;
        std::vector<FacetDef> facets;
        std::vector<CrosswalkRule> crosswalk;
        std::vector<ExclusionRecord> exclusions;
        // Enforce the bundled-dataset cardinalities (32 NBS, 10 UC, 19 ES).
        bool require_bundled_counts = false;
    };

    static Catalogue build(Parts parts);  // ValidationError on any invariant

    const std::vector<NbsEntry>& entries() const { return entries_; }
    const Taxonomy& taxonomy() const { return taxonomy_; }
    const std::vector<FacetDef>& facets() const { return facets_; }
    const Crosswalk& crosswalk() const { return crosswalk_; }
    const std::vector<ExclusionRecord>& exclusions() const { return exclusions_; }

    const NbsEntry* find(std::string_view id) const;
    const NbsEntry& at(std::string_view id) const;  // NotFoundError
    const FacetDef* find_facet(std::string_view id) const;
    std::vector<NbsId> ids() const;
    std::vector<FacetId> facet_ids() const;
    std::vector<FacetId> facet_ids(FacetKind kind) const;

    // Entries whose leaf is `code` or lies below it, natural id order.
    std::vector<NbsId> taxonomy_members(std::string_view code) const;
    TaxonomyCode classify(const std::vector<bool>& answers) const { return taxonomy_.classify(answers); }

    // NBS ids listing `label` among the given project's source names.
    std::vector<NbsId> nbs_for_label(std::string_view project, std::string_view label) const;

private:
    std::vector<NbsEntry> entries_;
    Taxonomy taxonomy_;
    std::vector<FacetDef> facets_;
    Crosswalk crosswalk_;
    std::vector<ExclusionRecord> exclusions_;
    std::unordered_map<std::string, std::size_t> entry_index_;
    std::unordered_map<std::string, std::size_t> facet_index_;
    std::map<std::pair<std::string, std::string>, std::vector<NbsId>, std::less<>> label_index_;
};

// Reads entries.jsonl, taxonomy.tsv, facets.tsv, crosswalk.tsv and
// exclusions.tsv from `dir`.
Catalogue load_catalogue(const std::filesystem::path& dir, bool require_bundled_counts = false);

}  // namespace nbs
