#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbs/catalogue.hpp"

namespace nbs {

// One binary judgement from one project: did the NBS (under the project's own
// name) address the project's facet?
struct RawScoreRecord {
    ProjectId project;
    std::string source_nbs_label;
    std::string project_facet_label;
    int value = 0;  // 0 or 1
};

struct BaselineValue {
    FacetId facet;
    int value = 0;
};

// Per-project score of one NBS on one baseline facet; nullopt when the
// project did not assess that facet.
struct NormalizedScore {
    ProjectId project;
    NbsId nbs;
    FacetId facet;
    std::optional<double> value;
};

// NBS x facet table of crossed scores in [0,1]; nullopt marks Missing.
class ScoreMatrix {
public:
    ScoreMatrix() = default;
    ScoreMatrix(std::vector<NbsId> rows, std::vector<FacetId> cols);

    const std::vector<NbsId>& rows() const { return rows_; }
    const std::vector<FacetId>& cols() const { return cols_; }
    std::size_t row_count() const { return rows_.size(); }
    std::size_t col_count() const { return cols_.size(); }

    std::optional<std::size_t> row_index(std::string_view id) const;
    std::optional<std::size_t> col_index(std::string_view id) const;

    const std::optional<double>& at(std::size_t r, std::size_t c) const { return cells_[r * cols_.size() + c]; }
    std::optional<double>& at(std::size_t r, std::size_t c) { return cells_[r * cols_.size() + c]; }
    // NotFoundError on unknown ids.
    const std::optional<double>& cell(std::string_view nbs, std::string_view facet) const;

    std::vector<std::optional<double>> row(std::size_t r) const;
    std::vector<std::optional<double>> column(std::size_t c) const;

    bool operator==(const ScoreMatrix&) const = default;

private:
    std::vector<NbsId> rows_;
    std::vector<FacetId> cols_;
    std::vector<std::optional<double>> cells_;
};

struct FacetSummary {
    FacetId facet;
    double median = 0.0;
    double mean = 0.0;
    int count_nonmissing = 0;
};

// Throws DomainError("no crosswalk ...") for an unmapped project label and
// for values outside {0,1}.
BaselineValue map_to_baseline(const RawScoreRecord& record, const Crosswalk& crosswalk);

// Mean of the binary values of every record (all from `project`, all
// crosswalked to `facet`). Empty input yields a Missing score.
NormalizedScore normalize_project(std::string_view project, std::string_view nbs, std::string_view facet,
                                  std::span<const RawScoreRecord> records, const Crosswalk& crosswalk);

// Unweighted mean over contributing projects per (nbs, facet).
ScoreMatrix cross_scores(std::span<const NormalizedScore> normalized, std::vector<NbsId> rows,
                         std::vector<FacetId> cols);

// Runs map -> normalize -> cross for every record against the catalogue.
// Every record must resolve to at least one NBS and one baseline facet.
ScoreMatrix compute_score_matrix(const Catalogue& catalogue, std::span<const RawScoreRecord> records);

FacetSummary facet_summary(const ScoreMatrix& matrix, std::string_view facet);

// Median of a non-empty sample; even counts average the two middle values.
double median(std::vector<double> values);

// Row means of the ES columns of each category (Missing cells excluded,
// all-Missing category -> Missing), appended after the UC columns. UC columns
// are copied as-is.
ScoreMatrix facet_view(const ScoreMatrix& matrix, const Catalogue& catalogue);

std::vector<RawScoreRecord> load_raw_scores(const std::filesystem::path& path);
void write_raw_scores(const std::filesystem::path& path, std::span<const RawScoreRecord> records);

// Tab-separated: header "nbs" + column ids; Missing is an empty field;
// values use the shortest round-trip decimal form.
void write_score_matrix(std::ostream& out, const ScoreMatrix& matrix);
void write_score_matrix(const std::filesystem::path& path, const ScoreMatrix& matrix);
ScoreMatrix read_score_matrix(const std::filesystem::path& path);

}  // namespace nbs
