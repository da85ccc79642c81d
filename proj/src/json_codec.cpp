#include "nbs/json_codec.hpp"

#include <charconv>

#include "nbs/error.hpp"
#include "nbs/tsv.hpp"

namespace nbs {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json to_json(const NbsEntry& e) {
    Json labels = Json::object();
    for (const auto& [project, names] : e.project_labels) labels[project] = names;
    return Json{{"id", e.id},
                {"final_name", e.final_name},
                {"aliases", e.aliases},
                {"description", e.description},
                {"taxonomy_leaf", e.taxonomy_leaf},
                {"inferred_leaf", e.inferred_leaf},
                {"project_labels", labels},
                {"name_provenance", to_string(e.name_provenance)}};
}

Json to_json(const Taxonomy& taxonomy, const Catalogue& catalogue) {
    Json nodes = Json::array();
    for (const auto& n : taxonomy.nodes())
        nodes.push_back(Json{{"code", n.code},
                             {"parent", n.parent ? Json(*n.parent) : Json(nullptr)},
                             {"level", n.level},
                             {"question", n.question},
                             {"children", taxonomy.children(n.code)},
                             {"members", catalogue.taxonomy_members(n.code)}});
    return Json{{"roots", taxonomy.roots()}, {"nodes", nodes}};
}

Json to_json(const FacetDef& f) {
    return Json{{"id", f.id},
                {"kind", to_string(f.kind)},
                {"es_category", f.es_category ? Json(to_string(*f.es_category)) : Json(nullptr)},
                {"label", f.label}};
}

Json to_json(const ScoreMatrix& m) {
    Json cells = Json::array();
    for (std::size_t r = 0; r < m.row_count(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.col_count(); ++c) row.push_back(optional_number(m.at(r, c)));
        cells.push_back(std::move(row));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"cells", cells}};
}

Json to_json(const EvennessResult& r) {
    return Json{{"nbs", r.nbs},
                {"diversity", r.diversity},
                {"facet_count", r.facet_count},
                {"evenness", optional_number(r.evenness)}};
}

namespace {

Json matrix_json(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Json vector_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

}  // namespace

Json to_json(const PcaResult& p, std::span<const FacetId> dropped) {
    Json imputed = Json::array();
    for (const auto& c : p.imputed_cells)
        imputed.push_back(Json{{"nbs", p.row_ids.at(c.row)}, {"variable", p.variable_ids.at(c.col)}, {"value", c.value}});
    return Json{{"row_ids", p.row_ids},
                {"variable_ids", p.variable_ids},
                {"dropped_variables", std::vector<FacetId>(dropped.begin(), dropped.end())},
                {"eigenvalues", vector_json(p.eigenvalues)},
                {"variance_fraction", vector_json(p.variance_fraction)},
                {"loadings", matrix_json(p.loadings)},
                {"component_scores", matrix_json(p.component_scores)},
                {"imputed_cells", imputed},
                {"imputation_iterations", p.imputation_iterations},
                {"imputation_converged", p.imputation_converged}};
}

Json to_json(const NameDecision& d) {
    Json audit = Json::array();
    for (const auto& s : d.audit)
        audit.push_back(Json{{"stage", s.stage}, {"inputs", s.inputs}, {"rule", s.rule}, {"outcome", s.outcome}});
    return Json{{"nbs", d.nbs}, {"final_name", d.final_name}, {"path", to_string(d.path)}, {"audit", audit}};
}

Json to_json(const NbsProfile& p) {
    auto facets = [](const std::vector<FacetValue>& values) {
        Json out = Json::array();
        for (const auto& [id, v] : values)
            out.push_back(Json{{"facet", id}, {"value", optional_number(v)}, {"unassessed", !v.has_value()}});
        return out;
    };
    Json means = Json::array();
    for (const auto& [cat, v] : p.es_category_means)
        means.push_back(Json{{"category", to_string(cat)}, {"value", optional_number(v)}, {"unassessed", !v.has_value()}});
    return Json{{"nbs", p.nbs},
                {"name", p.name},
                {"uc_scores", facets(p.uc_scores)},
                {"es_scores", facets(p.es_scores)},
                {"es_category_means", means},
                {"evenness", to_json(p.evenness)},
                {"taxonomy_path", p.taxonomy_path}};
}

Json to_json(const RankingRequest& r) {
    Json target;
    switch (r.target) {
        case RankTarget::Facet: target = r.facet; break;
        case RankTarget::Category: target = std::string(to_string(r.category)); break;
        case RankTarget::Weighted:
            target = Json::object();
            for (const auto& [id, w] : r.weights) target[id] = w;
            break;
    }
    return Json{{"mode", to_string(r.target)},
                {"target", target},
                {"filter", r.filter ? Json(*r.filter) : Json(nullptr)},
                {"top_n", r.top_n}};
}

Json to_json(const RankedList& list, const Catalogue& catalogue) {
    Json entries = Json::array();
    for (const auto& e : list.entries) {
        const auto* entry = catalogue.find(e.nbs);
        entries.push_back(Json{{"nbs", e.nbs},
                               {"name", entry ? entry->final_name : std::string()},
                               {"value", e.value},
                               {"unassessed", e.unassessed}});
    }
    return Json{{"request", to_json(list.request)}, {"entries", entries}};
}

Json to_json(std::span<const ScatterPoint> points) {
    Json out = Json::array();
    for (const auto& p : points) out.push_back(Json{{"nbs", p.nbs}, {"x", p.x}, {"y", p.y}, {"color_key", p.color_key}});
    return out;
}

Json to_json(const ChiSquareResult& r) {
    return Json{{"statistic", r.statistic}, {"df", r.df}, {"p_value", r.p_value}};
}

RankingRequest ranking_request_for_target(const std::string& target) {
    if (target.empty()) throw ValidationError("empty ranking target");
    if (auto cat = parse_es_category(target)) return RankingRequest::for_category(*cat);
    for (auto cat : kEsCategories)
        if (es_category_column(cat) == target) return RankingRequest::for_category(cat);
    return RankingRequest::for_facet(target);
}

RankingRequest ranking_request_from_json(const Json& body) {
    if (!body.is_object()) throw ValidationError("ranking request must be an object");
    if (!body.contains("target")) throw ValidationError("ranking request lacks 'target'");
    const auto& target = body.at("target");
    RankingRequest req;
    if (target.is_string()) {
        req = ranking_request_for_target(target.get<std::string>());
    } else if (target.is_object()) {
        std::vector<std::pair<FacetId, double>> weights;
        for (const auto& [key, value] : target.items()) {
            if (!value.is_number()) throw ValidationError("weight for '" + key + "' is not a number", key);
            weights.emplace_back(key, value.get<double>());
        }
        req = RankingRequest::weighted(std::move(weights));
    } else {
        throw ValidationError("'target' must be a facet id, an ES category or a weight map");
    }
    if (body.contains("filter") && !body.at("filter").is_null()) {
        if (!body.at("filter").is_string()) throw ValidationError("'filter' must be a taxonomy code");
        req.filter = body.at("filter").get<std::string>();
    }
    if (body.contains("top_n")) {
        const auto& n = body.at("top_n");
        if (!n.is_number_integer()) throw ValidationError("'top_n' must be an integer");
        req.top_n = n.get<int>();
    }
    return req;
}

std::vector<std::pair<FacetId, double>> parse_weights(const std::string& text) {
    std::vector<std::pair<FacetId, double>> out;
    for (const auto& item : split(text, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("weight '" + item + "' is not of the form facet=value");
        const auto key = item.substr(0, eq);
        const auto val = item.substr(eq + 1);
        double w = 0.0;
        const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), w);
        if (ec != std::errc() || ptr != val.data() + val.size())
            throw ValidationError("weight for '" + key + "' is not a number");
        out.emplace_back(key, w);
    }
    return out;
}

}  // namespace nbs
