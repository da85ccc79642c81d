#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nbs/catalogue.hpp"
#include "nbs/scoring.hpp"
#include "nbs/stats.hpp"

namespace nbs {

using FacetValue = std::pair<FacetId, std::optional<double>>;

struct NbsProfile {
    NbsId nbs;
    std::string name;
    std::vector<FacetValue> uc_scores;
    std::vector<FacetValue> es_scores;
    std::vector<std::pair<EsCategory, std::optional<double>>> es_category_means;
    EvennessResult evenness;
    std::vector<TaxonomyCode> taxonomy_path;
};

// `matrix` holds the baseline facets (UC and individual ES columns).
NbsProfile profile(const Catalogue& catalogue, const ScoreMatrix& matrix, std::string_view nbs);

enum class RankTarget { Facet, Category, Weighted };

struct RankingRequest {
    RankTarget target = RankTarget::Facet;
    FacetId facet;                                   // Facet
    EsCategory category = EsCategory::Provisioning;  // Category
    // Weighted: keys are baseline facet ids or ES category columns
    // ("es_regulating"); weights >= 0 with at least one positive.
    std::vector<std::pair<FacetId, double>> weights;
    std::optional<TaxonomyCode> filter;
    int top_n = 10;

    static RankingRequest for_facet(FacetId facet, int top_n = 10);
    static RankingRequest for_category(EsCategory category, int top_n = 10);
    static RankingRequest weighted(std::vector<std::pair<FacetId, double>> weights, int top_n = 10);
};

struct RankedEntry {
    NbsId nbs;
    double value = 0.0;
    bool unassessed = false;  // a contributing score was Missing and counted as 0
};

struct RankedList {
    RankingRequest request;
    std::vector<RankedEntry> entries;  // value non-increasing, ties by ascending id
};

// ValidationError for malformed requests, DomainError when the filter leaves
// nothing to rank.
RankedList rank(const Catalogue& catalogue, const ScoreMatrix& matrix, const RankingRequest& request);

struct ScatterPoint {
    NbsId nbs;
    double x = 0.0;
    double y = 0.0;
    TaxonomyCode color_key;  // level-2 taxonomy code
};

// Dimensions are 1-based component numbers.
std::vector<ScatterPoint> scatter_data(const PcaResult& pca, const Catalogue& catalogue, int dim_x, int dim_y);

std::string to_string(RankTarget t);

}  // namespace nbs
