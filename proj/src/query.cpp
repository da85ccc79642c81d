#include "nbs/query.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nbs/error.hpp"

namespace nbs {

std::string to_string(RankTarget t) {
    switch (t) {
        case RankTarget::Facet: return "facet";
        case RankTarget::Category: return "category";
        case RankTarget::Weighted: return "weighted";
    }
    return "facet";
}

NbsProfile profile(const Catalogue& catalogue, const ScoreMatrix& matrix, std::string_view nbs) {
    const auto& entry = catalogue.at(nbs);
    const auto r = matrix.row_index(nbs);
    if (!r) throw NotFoundError("no scores for '" + std::string(nbs) + "'", std::string(nbs));

    NbsProfile p;
    p.nbs = entry.id;
    p.name = entry.final_name;
    for (const auto& f : catalogue.facets()) {
        const auto c = matrix.col_index(f.id);
        std::optional<double> v = c ? matrix.at(*r, *c) : std::nullopt;
        (f.kind == FacetKind::UrbanChallenge ? p.uc_scores : p.es_scores).emplace_back(f.id, v);
    }
    const auto view = facet_view(matrix, catalogue);
    for (auto cat : kEsCategories) {
        const auto c = view.col_index(es_category_column(cat));
        p.es_category_means.emplace_back(cat, c ? view.at(*r, *c) : std::nullopt);
    }
    p.evenness = evenness(nbs, view);
    p.taxonomy_path = catalogue.taxonomy().path(entry.taxonomy_leaf);
    return p;
}

RankingRequest RankingRequest::for_facet(FacetId facet, int top_n) {
    RankingRequest r;
    r.target = RankTarget::Facet;
    r.facet = std::move(facet);
    r.top_n = top_n;
    return r;
}

RankingRequest RankingRequest::for_category(EsCategory category, int top_n) {
    RankingRequest r;
    r.target = RankTarget::Category;
    r.category = category;
    r.top_n = top_n;
    return r;
}

RankingRequest RankingRequest::weighted(std::vector<std::pair<FacetId, double>> weights, int top_n) {
    RankingRequest r;
    r.target = RankTarget::Weighted;
    r.weights = std::move(weights);
    r.top_n = top_n;
    return r;
}

namespace {

struct Term {
    const ScoreMatrix* source;
    std::size_t col;
    double weight;
};

}  // namespace

RankedList rank(const Catalogue& catalogue, const ScoreMatrix& matrix, const RankingRequest& request) {
    if (request.top_n < 1) throw ValidationError("top_n must be >= 1");
    if (request.filter && !catalogue.taxonomy().find(*request.filter))
        throw ValidationError("unknown taxonomy code '" + *request.filter + "'", *request.filter);

    const auto view = facet_view(matrix, catalogue);
    auto resolve = [&](const FacetId& id) -> std::pair<const ScoreMatrix*, std::size_t> {
        if (auto c = matrix.col_index(id)) return {&matrix, *c};
        if (auto c = view.col_index(id)) return {&view, *c};
        throw ValidationError("unknown facet '" + id + "'", id);
    };

    std::vector<Term> terms;
    switch (request.target) {
        case RankTarget::Facet: {
            auto [m, c] = resolve(request.facet);
            terms.push_back({m, c, 1.0});
            break;
        }
        case RankTarget::Category: {
            auto [m, c] = resolve(es_category_column(request.category));
            terms.push_back({m, c, 1.0});
            break;
        }
        case RankTarget::Weighted: {
            if (request.weights.empty()) throw ValidationError("weighted ranking needs at least one weight");
            double total = 0.0;
            std::map<FacetId, double> seen;
            for (const auto& [id, w] : request.weights) {
                if (!std::isfinite(w) || w < 0.0)
                    throw ValidationError("weight for '" + id + "' must be a finite non-negative number", id);
                if (!seen.emplace(id, w).second) throw ValidationError("duplicate weight for '" + id + "'", id);
                resolve(id);
                total += w;
            }
            if (!(total > 0.0)) throw ValidationError("at least one weight must be positive");
            for (const auto& [id, w] : request.weights) {
                if (w == 0.0) continue;
                auto [m, c] = resolve(id);
                terms.push_back({m, c, w / total});
            }
            break;
        }
    }

    RankedList out;
    out.request = request;
    for (std::size_t r = 0; r < matrix.row_count(); ++r) {
        const auto& id = matrix.rows()[r];
        const auto* entry = catalogue.find(id);
        if (request.filter) {
            if (!entry || !catalogue.taxonomy().descends_from(entry->taxonomy_leaf, *request.filter)) continue;
        }
        RankedEntry e;
        e.nbs = id;
        for (const auto& t : terms) {
            const auto& v = t.source->at(r, t.col);
            if (v) e.value += t.weight * *v;
            else e.unassessed = true;
        }
        out.entries.push_back(std::move(e));
    }
    if (out.entries.empty()) throw DomainError("ranking is empty after filtering");
    std::sort(out.entries.begin(), out.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.value != b.value) return a.value > b.value;
        return natural_less(a.nbs, b.nbs);
    });
    if (out.entries.size() > static_cast<std::size_t>(request.top_n))
        out.entries.resize(static_cast<std::size_t>(request.top_n));
    return out;
}

std::vector<ScatterPoint> scatter_data(const PcaResult& pca, const Catalogue& catalogue, int dim_x, int dim_y) {
    const auto n = static_cast<int>(pca.component_scores.cols());
    for (int d : {dim_x, dim_y})
        if (d < 1 || d > n)
            throw DomainError("component " + std::to_string(d) + " out of range 1.." + std::to_string(n));
    std::vector<ScatterPoint> out;
    out.reserve(pca.row_ids.size());
    for (std::size_t i = 0; i < pca.row_ids.size(); ++i) {
        ScatterPoint p;
        p.nbs = pca.row_ids[i];
        const auto row = static_cast<Eigen::Index>(i);
        p.x = pca.component_scores(row, dim_x - 1);
        p.y = pca.component_scores(row, dim_y - 1);
        p.color_key = catalogue.taxonomy().ancestor_at_level(catalogue.at(p.nbs).taxonomy_leaf, 2);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace nbs
