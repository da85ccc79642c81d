#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <vector>

#include "nbs/catalogue.hpp"
#include "nbs/consensus.hpp"
#include "nbs/query.hpp"
#include "nbs/scoring.hpp"
#include "nbs/stats.hpp"

namespace nbs {

// Plot-ready tab-separated tables. Statistics use 9 significant digits;
// Missing and Undefined are empty fields.

// nbs, name, kind, es_category, facet, value, unassessed
void write_profiles(std::ostream& out, const Catalogue& catalogue, const ScoreMatrix& matrix);
// facet, kind, count_nonmissing, median, mean over baseline and aggregate columns
void write_facet_summaries(std::ostream& out, const Catalogue& catalogue, const ScoreMatrix& matrix);
// target, rank, nbs, name, value, unassessed
void write_rankings(std::ostream& out, const Catalogue& catalogue, std::span<const RankedList> lists);
// nbs, name, diversity, facet_count, evenness
void write_evenness(std::ostream& out, const Catalogue& catalogue, std::span<const EvennessResult> results);
// component, eigenvalue, variance_fraction, cumulative_fraction
void write_pca_eigen(std::ostream& out, const PcaResult& pca);
// nbs, color_key, PC1..PCp
void write_pca_scores(std::ostream& out, const PcaResult& pca, const Catalogue& catalogue);
// variable, PC1..PCp
void write_pca_loadings(std::ostream& out, const PcaResult& pca);
// nbs, final_name, path
void write_names(std::ostream& out, std::span<const NameDecision> decisions);

// Top-N lists for every UC facet and every ES category.
std::vector<RankedList> standard_rankings(const Catalogue& catalogue, const ScoreMatrix& matrix, int top_n = 10);

struct ExportInputs {
    const Catalogue& catalogue;
    const ScoreMatrix& scores;
    const PcaResult& pca;
    std::span<const EvennessResult> evenness;
    std::span<const NameDecision> decisions;  // may be empty
    int top_n = 10;
};

// Writes every table into `dir` (created if needed); returns the paths.
std::vector<std::filesystem::path> export_plot_tables(const std::filesystem::path& dir, const ExportInputs& inputs);

}  // namespace nbs
