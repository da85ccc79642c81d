#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "nbs/catalogue.hpp"
#include "nbs/consensus.hpp"
#include "nbs/query.hpp"
#include "nbs/scoring.hpp"
#include "nbs/stats.hpp"

namespace nbs {

using Json = nlohmann::ordered_json;

Json to_json(const NbsEntry& entry);
Json to_json(const Taxonomy& taxonomy, const Catalogue& catalogue);
Json to_json(const FacetDef& facet);
Json to_json(const ScoreMatrix& matrix);
Json to_json(const EvennessResult& result);
Json to_json(const PcaResult& result, std::span<const FacetId> dropped = {});
Json to_json(const NameDecision& decision);
Json to_json(const NbsProfile& profile);
Json to_json(const RankingRequest& request);
Json to_json(const RankedList& list, const Catalogue& catalogue);
Json to_json(std::span<const ScatterPoint> points);
Json to_json(const ChiSquareResult& result);

// Missing -> null
Json optional_number(const std::optional<double>& v);

// {"target": "<facet id>" | "<ES category>" | "es_<category>" | {"<facet>": weight, ...},
//  "filter": "<taxonomy code>", "top_n": n}. ValidationError on malformed input.
RankingRequest ranking_request_from_json(const Json& body);
// Resolves a single target string: ES category names and their aggregate
// column ids select category mode, anything else is a facet id.
RankingRequest ranking_request_for_target(const std::string& target);

// Parses "facet=w,facet=w".
std::vector<std::pair<FacetId, double>> parse_weights(const std::string& text);

}  // namespace nbs
