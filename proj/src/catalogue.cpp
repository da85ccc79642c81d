#include "nbs/catalogue.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "json.hpp"

#include "nbs/error.hpp"
#include "nbs/tsv.hpp"

namespace nbs {

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [v, name] : table)
        if (name == s) return v;
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view enum_name(E v, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [e, name] : table)
        if (e == v) return name;
    return "?";
}

constexpr std::array<std::pair<NameProvenance, std::string_view>, 4> kProvenance{{
    {NameProvenance::Round1, "Round1"},
    {NameProvenance::Round2, "Round2"},
    {NameProvenance::CitationArbitration, "CitationArbitration"},
    {NameProvenance::ExpertOverride, "ExpertOverride"},
}};
constexpr std::array<std::pair<FacetKind, std::string_view>, 2> kFacetKind{{
    {FacetKind::UrbanChallenge, "UrbanChallenge"},
    {FacetKind::EcosystemService, "EcosystemService"},
}};
constexpr std::array<std::pair<EsCategory, std::string_view>, 4> kEsCategory{{
    {EsCategory::Provisioning, "Provisioning"},
    {EsCategory::Regulating, "Regulating"},
    {EsCategory::Cultural, "Cultural"},
    {EsCategory::Supporting, "Supporting"},
}};
constexpr std::array<std::pair<ExclusionReason, std::string_view>, 7> kReason{{
    {ExclusionReason::BenefitNotSolution, "BenefitNotSolution"},
    {ExclusionReason::InspiredNotEmploying, "InspiredNotEmploying"},
    {ExclusionReason::PlanningManagementApproach, "PlanningManagementApproach"},
    {ExclusionReason::TooIntensiveNotInNature, "TooIntensiveNotInNature"},
    {ExclusionReason::CategoryNotSolution, "CategoryNotSolution"},
    {ExclusionReason::NoAssessment, "NoAssessment"},
    {ExclusionReason::NotCrossProject, "NotCrossProject"},
}};

}  // namespace

std::string_view to_string(NameProvenance v) { return enum_name(v, kProvenance); }
std::string_view to_string(FacetKind v) { return enum_name(v, kFacetKind); }
std::string_view to_string(EsCategory v) { return enum_name(v, kEsCategory); }
std::string_view to_string(ExclusionReason v) { return enum_name(v, kReason); }
std::optional<NameProvenance> parse_name_provenance(std::string_view s) { return parse_enum(s, kProvenance); }
std::optional<FacetKind> parse_facet_kind(std::string_view s) { return parse_enum(s, kFacetKind); }
std::optional<EsCategory> parse_es_category(std::string_view s) { return parse_enum(s, kEsCategory); }
std::optional<ExclusionReason> parse_exclusion_reason(std::string_view s) { return parse_enum(s, kReason); }

FacetId es_category_column(EsCategory c) {
    std::string name(to_string(c));
    for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return "es_" + name;
}

bool natural_less(std::string_view a, std::string_view b) {
    auto split_num = [](std::string_view s) {
        std::size_t i = s.size();
        while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
        return std::pair{s.substr(0, i), s.substr(i)};
    };
    auto [pa, na] = split_num(a);
    auto [pb, nb] = split_num(b);
    if (pa != pb) return a < b;
    if (na.size() != nb.size()) return na.size() < nb.size();
    return na < nb;
}

// --- Taxonomy ---------------------------------------------------------------

Taxonomy::Taxonomy(std::vector<TaxonomyNode> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.code.empty()) throw ValidationError("taxonomy: node with empty code");
        if (!index_.emplace(n.code, i).second)
            throw ValidationError("taxonomy: duplicate code '" + n.code + "'", n.code);
        if (n.question.empty())
            throw ValidationError("taxonomy: node '" + n.code + "' has no guiding question", n.code);
    }
    if (nodes_.empty()) throw ValidationError("taxonomy: no nodes");
    for (const auto& n : nodes_) {
        if (!n.parent) {
            if (n.level != 1)
                throw ValidationError("taxonomy: root '" + n.code + "' must be level 1", n.code);
            continue;
        }
        const auto* p = find(*n.parent);
        if (!p)
            throw ValidationError("taxonomy: node '" + n.code + "' has unknown parent '" + *n.parent + "'",
                                  n.code);
        // levels strictly increase along parent links, so no cycles can form
        if (n.level != p->level + 1)
            throw ValidationError("taxonomy: node '" + n.code + "' level " + std::to_string(n.level) +
                                      " is not parent level + 1",
                                  n.code);
        if (n.level > 3) throw ValidationError("taxonomy: depth exceeds 3 at '" + n.code + "'", n.code);
    }
}

const TaxonomyNode* Taxonomy::find(std::string_view code) const {
    auto it = index_.find(std::string(code));
    return it == index_.end() ? nullptr : &nodes_[it->second];
}

const TaxonomyNode& Taxonomy::at(std::string_view code) const {
    const auto* n = find(code);
    if (!n) throw NotFoundError("unknown taxonomy code '" + std::string(code) + "'", std::string(code));
    return *n;
}

std::vector<TaxonomyCode> Taxonomy::roots() const {
    std::vector<TaxonomyCode> out;
    for (const auto& n : nodes_)
        if (!n.parent) out.push_back(n.code);
    return out;
}

std::vector<TaxonomyCode> Taxonomy::children(std::string_view code) const {
    std::vector<TaxonomyCode> out;
    for (const auto& n : nodes_)
        if (n.parent && *n.parent == code) out.push_back(n.code);
    return out;
}

bool Taxonomy::is_leaf(std::string_view code) const { return find(code) && children(code).empty(); }

std::vector<TaxonomyCode> Taxonomy::leaves() const {
    std::vector<TaxonomyCode> out;
    for (const auto& n : nodes_)
        if (children(n.code).empty()) out.push_back(n.code);
    return out;
}

std::vector<TaxonomyCode> Taxonomy::path(std::string_view code) const {
    std::vector<TaxonomyCode> out;
    const TaxonomyNode* n = &at(code);
    while (true) {
        out.push_back(n->code);
        if (!n->parent) break;
        n = &at(*n->parent);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

bool Taxonomy::descends_from(std::string_view code, std::string_view ancestor) const {
    for (const auto& c : path(code))
        if (c == ancestor) return true;
    return false;
}

TaxonomyCode Taxonomy::ancestor_at_level(std::string_view code, int level) const {
    auto p = path(code);
    if (level < 1 || static_cast<std::size_t>(level) > p.size()) return p.back();
    return p[static_cast<std::size_t>(level) - 1];
}

TaxonomyCode Taxonomy::descend(const std::vector<bool>& answers, std::vector<std::string>* asked) const {
    std::size_t used = 0;
    auto group = roots();
    while (true) {
        TaxonomyCode chosen = group.back();
        for (std::size_t i = 0; i + 1 < group.size(); ++i) {
            const auto& q = at(group[i]).question;
            if (asked) asked->push_back(q);
            if (used == answers.size()) {
                if (asked) return {};
                throw DomainError("incomplete answer sequence: no answer for \"" + q + "\" (tree not at a leaf)",
                                  group[i]);
            }
            if (answers[used++]) {
                chosen = group[i];
                break;
            }
        }
        auto next = children(chosen);
        if (next.empty()) {
            if (used != answers.size() && !asked)
                throw DomainError("answer sequence continues past leaf '" + chosen + "' (" +
                                      std::to_string(answers.size() - used) + " unused)",
                                  chosen);
            return chosen;
        }
        group = std::move(next);
    }
}

TaxonomyCode Taxonomy::classify(const std::vector<bool>& answers) const { return descend(answers, nullptr); }

std::vector<std::string> Taxonomy::questions_asked(const std::vector<bool>& answers) const {
    std::vector<std::string> asked;
    descend(answers, &asked);
    return asked;
}

std::vector<bool> Taxonomy::answers_for(std::string_view leaf) const {
    if (!is_leaf(leaf)) throw DomainError("'" + std::string(leaf) + "' is not a leaf", std::string(leaf));
    std::vector<bool> out;
    for (const auto& code : path(leaf)) {
        const auto& node = at(code);
        auto group = node.parent ? children(*node.parent) : roots();
        const auto pos = static_cast<std::size_t>(std::find(group.begin(), group.end(), code) - group.begin());
        for (std::size_t i = 0; i < pos; ++i) out.push_back(false);
        if (pos + 1 < group.size()) out.push_back(true);
    }
    return out;
}

// --- Crosswalk --------------------------------------------------------------

Crosswalk::Crosswalk(std::vector<CrosswalkRule> rules) : rules_(std::move(rules)) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const auto& r = rules_[i];
        if (!index_.emplace(std::pair{r.project, r.project_facet_label}, i).second)
            throw ValidationError("crosswalk: label '" + r.project_facet_label + "' of project " + r.project +
                                      " maps to more than one baseline facet",
                                  r.project + "/" + r.project_facet_label);
    }
}

const CrosswalkRule* Crosswalk::find(std::string_view project, std::string_view label) const {
    auto it = index_.find(std::pair{std::string(project), std::string(label)});
    return it == index_.end() ? nullptr : &rules_[it->second];
}

// --- Catalogue --------------------------------------------------------------

Catalogue Catalogue::build(Parts parts) {
    Catalogue c;
    c.taxonomy_ = Taxonomy(std::move(parts.taxonomy));

    std::sort(parts.entries.begin(), parts.entries.end(),
              [](const NbsEntry& a, const NbsEntry& b) { return natural_less(a.id, b.id); });
    c.entries_ = std::move(parts.entries);
    for (std::size_t i = 0; i < c.entries_.size(); ++i) {
        const auto& e = c.entries_[i];
        if (e.id.empty()) throw ValidationError("entry with empty id");
        if (!c.entry_index_.emplace(e.id, i).second)
            throw ValidationError("duplicate NBS id '" + e.id + "'", e.id);
        if (e.final_name.empty()) throw ValidationError("NBS '" + e.id + "' has no final name", e.id);
        if (!c.taxonomy_.find(e.taxonomy_leaf))
            throw ValidationError("NBS '" + e.id + "' maps to unknown taxonomy code '" + e.taxonomy_leaf + "'", e.id);
        if (!c.taxonomy_.is_leaf(e.taxonomy_leaf))
            throw ValidationError("NBS '" + e.id + "' maps to non-leaf taxonomy code '" + e.taxonomy_leaf + "'",
                                  e.id);
        std::size_t projects = 0;
        for (const auto& [project, labels] : e.project_labels) {
            if (labels.empty()) continue;
            ++projects;
            for (const auto& label : labels) c.label_index_[std::pair{project, label}].push_back(e.id);
        }
        if (projects < 2)
            throw ValidationError("NBS '" + e.id + "' is listed by " + std::to_string(projects) +
                                      " project(s); at least 2 are required",
                                  e.id);
    }

    c.facets_ = std::move(parts.facets);
    std::size_t uc = 0, es = 0;
    for (std::size_t i = 0; i < c.facets_.size(); ++i) {
        const auto& f = c.facets_[i];
        if (!c.facet_index_.emplace(f.id, i).second)
            throw ValidationError("duplicate facet id '" + f.id + "'", f.id);
        const bool is_es = f.kind == FacetKind::EcosystemService;
        if (is_es != f.es_category.has_value())
            throw ValidationError("facet '" + f.id + "': es_category must be present iff kind is EcosystemService",
                                  f.id);
        (is_es ? es : uc)++;
    }

    for (const auto& r : parts.crosswalk)
        if (!c.find_facet(r.baseline_facet))
            throw ValidationError("crosswalk: label '" + r.project_facet_label + "' maps to unknown facet '" +
                                      r.baseline_facet + "'",
                                  r.baseline_facet);
    c.crosswalk_ = Crosswalk(std::move(parts.crosswalk));
    c.exclusions_ = std::move(parts.exclusions);

    if (parts.require_bundled_counts) {
        if (c.entries_.size() != 32)
            throw ValidationError("expected 32 NBS entries, found " + std::to_string(c.entries_.size()));
        if (uc != 10 || es != 19)
            throw ValidationError("expected 10 urban-challenge and 19 ecosystem-service facets, found " +
                                  std::to_string(uc) + " and " + std::to_string(es));
    }
    return c;
}

const NbsEntry* Catalogue::find(std::string_view id) const {
    auto it = entry_index_.find(std::string(id));
    return it == entry_index_.end() ? nullptr : &entries_[it->second];
}

const NbsEntry& Catalogue::at(std::string_view id) const {
    const auto* e = find(id);
    if (!e) throw NotFoundError("unknown NBS id '" + std::string(id) + "'", std::string(id));
    return *e;
}

const FacetDef* Catalogue::find_facet(std::string_view id) const {
    auto it = facet_index_.find(std::string(id));
    return it == facet_index_.end() ? nullptr : &facets_[it->second];
}

std::vector<NbsId> Catalogue::ids() const {
    std::vector<NbsId> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.id);
    return out;
}

std::vector<FacetId> Catalogue::facet_ids() const {
    std::vector<FacetId> out;
    for (const auto& f : facets_) out.push_back(f.id);
    return out;
}

std::vector<FacetId> Catalogue::facet_ids(FacetKind kind) const {
    std::vector<FacetId> out;
    for (const auto& f : facets_)
        if (f.kind == kind) out.push_back(f.id);
    return out;
}

std::vector<NbsId> Catalogue::taxonomy_members(std::string_view code) const {
    taxonomy_.at(code);
    std::vector<NbsId> out;
    for (const auto& e : entries_)
        if (taxonomy_.descends_from(e.taxonomy_leaf, code)) out.push_back(e.id);
    return out;
}

std::vector<NbsId> Catalogue::nbs_for_label(std::string_view project, std::string_view label) const {
    auto it = label_index_.find(std::pair{std::string(project), std::string(label)});
    return it == label_index_.end() ? std::vector<NbsId>{} : it->second;
}

// --- loading ----------------------------------------------------------------

namespace {

std::vector<NbsEntry> read_entries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "-", "cannot open file");
    std::vector<NbsEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path.string(), line_no, "-", e.what());
        }
        auto field = [&](const char* name) -> const nlohmann::json& {
            if (!j.contains(name)) throw ParseError(path.string(), line_no, name, "missing field");
            return j.at(name);
        };
        try {
            NbsEntry e;
            e.id = field("id").get<std::string>();
            e.final_name = field("final_name").get<std::string>();
            e.aliases = j.value("aliases", std::vector<std::string>{});
            e.description = j.value("description", std::string{});
            e.taxonomy_leaf = field("taxonomy_leaf").get<std::string>();
            e.inferred_leaf = j.value("inferred", false);
            e.project_labels = field("project_labels").get<std::map<std::string, std::vector<std::string>>>();
            const auto prov = field("name_provenance").get<std::string>();
            auto p = parse_name_provenance(prov);
            if (!p) throw ParseError(path.string(), line_no, "name_provenance", "unknown value '" + prov + "'");
            e.name_provenance = *p;
            out.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(path.string(), line_no, "-", ex.what());
        }
    }
    return out;
}

std::vector<TaxonomyNode> read_taxonomy(const std::filesystem::path& path) {
    auto t = TsvTable::read(path);
    const auto c_code = t.column("code"), c_parent = t.column("parent"), c_level = t.column("level"),
               c_q = t.column("question");
    std::vector<TaxonomyNode> out;
    for (const auto& r : t.rows()) {
        TaxonomyNode n;
        n.code = t.cell(r, c_code);
        if (!t.cell(r, c_parent).empty()) n.parent = t.cell(r, c_parent);
        const auto level = t.integer(r, c_level);
        if (level < 1 || level > 3) t.fail(r, c_level, "level must be 1..3");
        n.level = static_cast<int>(level);
        n.question = t.cell(r, c_q);
        out.push_back(std::move(n));
    }
    return out;
}

std::vector<FacetDef> read_facets(const std::filesystem::path& path) {
    auto t = TsvTable::read(path);
    const auto c_id = t.column("id"), c_kind = t.column("kind"), c_cat = t.column("es_category"),
               c_label = t.column("label");
    std::vector<FacetDef> out;
    for (const auto& r : t.rows()) {
        FacetDef f;
        f.id = t.cell(r, c_id);
        auto kind = parse_facet_kind(t.cell(r, c_kind));
        if (!kind) t.fail(r, c_kind, "unknown facet kind '" + t.cell(r, c_kind) + "'");
        f.kind = *kind;
        if (!t.cell(r, c_cat).empty()) {
            auto cat = parse_es_category(t.cell(r, c_cat));
            if (!cat) t.fail(r, c_cat, "unknown ES category '" + t.cell(r, c_cat) + "'");
            f.es_category = *cat;
        }
        f.label = t.cell(r, c_label);
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<CrosswalkRule> read_crosswalk(const std::filesystem::path& path) {
    auto t = TsvTable::read(path);
    const auto c_p = t.column("project"), c_l = t.column("project_facet_label"), c_b = t.column("baseline_facet");
    const bool has_inf = t.has_column("inferred");
    std::vector<CrosswalkRule> out;
    for (const auto& r : t.rows()) {
        CrosswalkRule rule{t.cell(r, c_p), t.cell(r, c_l), t.cell(r, c_b), false};
        if (has_inf) rule.inferred = t.flag(r, t.column("inferred"));
        out.push_back(std::move(rule));
    }
    return out;
}

std::vector<ExclusionRecord> read_exclusions(const std::filesystem::path& path) {
    auto t = TsvTable::read(path);
    const auto c_i = t.column("item_name"), c_p = t.column("project"), c_r = t.column("reason");
    std::vector<ExclusionRecord> out;
    for (const auto& r : t.rows()) {
        auto reason = parse_exclusion_reason(t.cell(r, c_r));
        if (!reason) t.fail(r, c_r, "reason '" + t.cell(r, c_r) + "' is not in the exclusion taxonomy");
        out.push_back({t.cell(r, c_i), t.cell(r, c_p), *reason});
    }
    return out;
}

}  // namespace

Catalogue load_catalogue(const std::filesystem::path& dir, bool require_bundled_counts) {
    Catalogue::Parts parts;
    parts.entries = read_entries(dir / "entries.jsonl");
    parts.taxonomy = read_taxonomy(dir / "taxonomy.tsv");
    parts.facets = read_facets(dir / "facets.tsv");
    parts.crosswalk = read_crosswalk(dir / "crosswalk.tsv");
    if (std::filesystem::exists(dir / "exclusions.tsv")) parts.exclusions = read_exclusions(dir / "exclusions.tsv");
    parts.require_bundled_counts = require_bundled_counts;
    return Catalogue::build(std::move(parts));
}

}  // namespace nbs
