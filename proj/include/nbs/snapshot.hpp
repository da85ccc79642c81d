#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "nbs/catalogue.hpp"
#include "nbs/consensus.hpp"
#include "nbs/scoring.hpp"
#include "nbs/stats.hpp"

namespace nbs {

// Everything the service answers from, computed once per load.
struct Snapshot {
    std::uint64_t version = 0;
    std::filesystem::path data_dir;
    Catalogue catalogue;
    ScoreMatrix scores;  // baseline facets
    ScoreMatrix view;    // UC columns + ES category means
    ImputeOptions impute_options;
    PcaInput pca_input;
    PcaResult pca;
    std::vector<EvennessResult> evenness;
    ConsensusInputs consensus;  // empty when the directory has no survey tables
    std::vector<NameDecision> decisions;

    const NameDecision* decision(std::string_view nbs) const;
};

struct SnapshotOptions {
    ImputeOptions impute;
    bool require_bundled_counts = false;
    double alpha = 0.05;
};

// Loads catalogue + raw_scores.tsv (and the survey tables when present) and
// precomputes the statistics. Throws on any load or validation failure.
std::shared_ptr<const Snapshot> build_snapshot(const std::filesystem::path& dir, std::uint64_t version,
                                               const SnapshotOptions& options = {});

}  // namespace nbs
