#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nbs/catalogue.hpp"
#include "nbs/scoring.hpp"

namespace nbs {

// Shannon index H = -sum p ln p over the positive entries, p = s / sum(s).
// Throws DomainError for negative entries or when nothing is positive.
double shannon_diversity(std::span<const double> scores);

struct EvennessResult {
    NbsId nbs;
    double diversity = 0.0;          // Shannon H, natural log
    int facet_count = 0;             // S: variables with score > 0
    std::optional<double> evenness;  // H / ln S; nullopt (Undefined) for S <= 1
};

// Missing cells count as zero.
EvennessResult evenness_of(std::string_view nbs, std::span<const std::optional<double>> row);
EvennessResult evenness(std::string_view nbs, const ScoreMatrix& matrix);
std::vector<EvennessResult> evenness_all(const ScoreMatrix& matrix);

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct PcaInput {
    std::vector<NbsId> row_ids;
    std::vector<FacetId> variable_ids;
    Eigen::MatrixXd values;  // unobserved cells hold 0 and must be ignored
    BoolMatrix observed;
    bool standardized = true;
    std::vector<FacetId> dropped;  // UC columns removed by pretreatment

    std::size_t missing_count() const { return static_cast<std::size_t>((!observed).count()); }
};

PcaInput to_pca_input(const ScoreMatrix& matrix);

// Collapses ES into the four category means, then drops UC columns with
// more than one Missing cell.
PcaInput pretreat_for_pca(const ScoreMatrix& matrix, const Catalogue& catalogue);

struct ImputedCell {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

struct ImputeOptions {
    int components = 2;
    double tol = 1e-8;
    int max_iter = 1000;
};

struct ImputationResult {
    Eigen::MatrixXd completed;
    std::vector<ImputedCell> imputed_cells;
    int iterations = 0;
    bool converged = true;
};

// Iterative PCA completion: Missing cells start at their column means and
// are repeatedly overwritten by a rank-k reconstruction of the standardized
// matrix until the largest change drops below tol. Observed cells are never
// written.
ImputationResult impute_iterative_pca(const PcaInput& input, const ImputeOptions& options = {});

struct PcaResult {
    std::vector<NbsId> row_ids;
    std::vector<FacetId> variable_ids;
    Eigen::VectorXd eigenvalues;        // descending
    Eigen::MatrixXd loadings;           // variables x components, orthonormal columns
    Eigen::MatrixXd component_scores;   // rows x components
    Eigen::VectorXd variance_fraction;  // eigenvalue / sum of eigenvalues
    Eigen::VectorXd means;
    Eigen::VectorXd sds;
    std::vector<ImputedCell> imputed_cells;
    int imputation_iterations = 0;
    bool imputation_converged = true;

    std::size_t component_count() const { return static_cast<std::size_t>(eigenvalues.size()); }
    Eigen::MatrixXd standardized_data() const { return component_scores * loadings.transpose(); }
};

// Standardized (correlation) PCA on a complete matrix. Each loading vector
// is signed so that its largest-magnitude entry is positive.
PcaResult pca(const Eigen::MatrixXd& data, std::vector<NbsId> row_ids, std::vector<FacetId> variable_ids);

// pretreat -> impute -> pca
PcaResult run_pca(const ScoreMatrix& matrix, const Catalogue& catalogue, const ImputeOptions& options = {});

struct ChiSquareResult {
    double statistic = 0.0;
    int df = 1;
    double p_value = 1.0;
};

// Two observed counts against a 50/50 expectation, no continuity correction.
ChiSquareResult chi_square_one_sample(long long a, long long b);

}  // namespace nbs
