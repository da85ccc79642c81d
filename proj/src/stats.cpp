#include "nbs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "nbs/error.hpp"

namespace nbs {

double shannon_diversity(std::span<const double> scores) {
    double total = 0.0;
    for (double s : scores) {
        if (!(s >= 0.0)) throw DomainError("shannon_diversity: scores must be non-negative");
        total += s;
    }
    if (total <= 0.0) throw DomainError("shannon_diversity: no positive score");
    double h = 0.0;
    for (double s : scores) {
        if (s <= 0.0) continue;
        const double p = s / total;
        h -= p * std::log(p);
    }
    return h;
}

EvennessResult evenness_of(std::string_view nbs, std::span<const std::optional<double>> row) {
    std::vector<double> filled;
    filled.reserve(row.size());
    for (const auto& v : row) filled.push_back(v.value_or(0.0));
    EvennessResult out;
    out.nbs = std::string(nbs);
    out.facet_count = static_cast<int>(std::count_if(filled.begin(), filled.end(), [](double x) { return x > 0.0; }));
    if (out.facet_count == 0) return out;
    out.diversity = shannon_diversity(filled);
    if (out.facet_count >= 2) out.evenness = out.diversity / std::log(static_cast<double>(out.facet_count));
    return out;
}

EvennessResult evenness(std::string_view nbs, const ScoreMatrix& matrix) {
    auto r = matrix.row_index(nbs);
    if (!r) throw NotFoundError("unknown NBS id '" + std::string(nbs) + "'", std::string(nbs));
    const auto row = matrix.row(*r);
    return evenness_of(nbs, row);
}

std::vector<EvennessResult> evenness_all(const ScoreMatrix& matrix) {
    std::vector<EvennessResult> out;
    out.reserve(matrix.row_count());
    for (std::size_t r = 0; r < matrix.row_count(); ++r) {
        const auto row = matrix.row(r);
        out.push_back(evenness_of(matrix.rows()[r], row));
    }
    return out;
}

// --- PCA --------------------------------------------------------------------

PcaInput to_pca_input(const ScoreMatrix& matrix) {
    PcaInput in;
    in.row_ids = matrix.rows();
    in.variable_ids = matrix.cols();
    const auto n = static_cast<Eigen::Index>(matrix.row_count());
    const auto p = static_cast<Eigen::Index>(matrix.col_count());
    in.values = Eigen::MatrixXd::Zero(n, p);
    in.observed = BoolMatrix::Constant(n, p, false);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < p; ++c)
            if (const auto& v = matrix.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) {
                in.values(r, c) = *v;
                in.observed(r, c) = true;
            }
    return in;
}

PcaInput pretreat_for_pca(const ScoreMatrix& matrix, const Catalogue& catalogue) {
    const auto view = facet_view(matrix, catalogue);
    std::vector<std::size_t> keep;
    std::vector<FacetId> dropped;
    for (std::size_t c = 0; c < view.col_count(); ++c) {
        const auto* f = catalogue.find_facet(view.cols()[c]);
        if (f && f->kind == FacetKind::UrbanChallenge) {
            const auto col = view.column(c);
            const auto missing = std::count_if(col.begin(), col.end(), [](const auto& v) { return !v; });
            if (missing > 1) {
                dropped.push_back(f->id);
                continue;
            }
        }
        keep.push_back(c);
    }
    if (keep.empty()) throw DomainError("pretreat_for_pca: no variables retained");
    std::vector<FacetId> cols;
    for (auto c : keep) cols.push_back(view.cols()[c]);
    ScoreMatrix reduced(view.rows(), cols);
    for (std::size_t r = 0; r < view.row_count(); ++r)
        for (std::size_t i = 0; i < keep.size(); ++i) reduced.at(r, i) = view.at(r, keep[i]);
    auto in = to_pca_input(reduced);
    in.dropped = std::move(dropped);
    return in;
}

namespace {

struct ColumnStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;  // sample standard deviation
};

ColumnStats column_stats(const Eigen::MatrixXd& x) {
    ColumnStats s;
    s.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
    s.sd = (centered.colwise().squaredNorm().array() / static_cast<double>(x.rows() - 1)).sqrt().transpose();
    return s;
}

// Eigenpairs of a symmetric matrix sorted by descending eigenvalue, each
// vector signed so its largest-magnitude entry is positive.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> sorted_eigen(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
    const auto p = sym.rows();
    Eigen::VectorXd values(p);
    Eigen::MatrixXd vectors(p, p);
    // Eigen returns ascending order
    for (Eigen::Index i = 0; i < p; ++i) {
        values(i) = solver.eigenvalues()(p - 1 - i);
        Eigen::VectorXd v = solver.eigenvectors().col(p - 1 - i);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        vectors.col(i) = v;
    }
    return {values, vectors};
}

}  // namespace

ImputationResult impute_iterative_pca(const PcaInput& input, const ImputeOptions& options) {
    const auto n = input.values.rows();
    const auto p = input.values.cols();
    if (input.observed.rows() != n || input.observed.cols() != p)
        throw DomainError("impute_iterative_pca: mask shape does not match data");
    if (options.components < 1 || options.components >= std::min(n, p))
        throw DomainError("impute_iterative_pca: component count must satisfy 1 <= k < min(rows, variables)");
    if (options.max_iter < 1 || !(options.tol > 0.0))
        throw DomainError("impute_iterative_pca: max_iter must be >= 1 and tol > 0");
    for (Eigen::Index r = 0; r < n; ++r)
        if (!input.observed.row(r).any())
            throw DomainError("impute_iterative_pca: row '" + input.row_ids.at(static_cast<std::size_t>(r)) +
                              "' has no observed value");
    for (Eigen::Index c = 0; c < p; ++c)
        if (!input.observed.col(c).any())
            throw DomainError("impute_iterative_pca: variable '" + input.variable_ids.at(static_cast<std::size_t>(c)) +
                              "' has no observed value");

    ImputationResult out;
    out.completed = input.values;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> missing;
    for (Eigen::Index c = 0; c < p; ++c) {
        double sum = 0.0;
        int count = 0;
        for (Eigen::Index r = 0; r < n; ++r)
            if (input.observed(r, c)) {
                sum += input.values(r, c);
                ++count;
            }
        for (Eigen::Index r = 0; r < n; ++r)
            if (!input.observed(r, c)) {
                out.completed(r, c) = sum / count;
                missing.emplace_back(r, c);
            }
    }
    if (missing.empty()) return out;

    const auto k = static_cast<Eigen::Index>(options.components);
    out.converged = false;
    for (int it = 1; it <= options.max_iter; ++it) {
        auto stats = column_stats(out.completed);
        Eigen::VectorXd scale = stats.sd;
        if (!input.standardized) scale.setOnes();
        for (Eigen::Index c = 0; c < p; ++c)
            if (!(scale(c) > 0.0)) scale(c) = 1.0;
        const Eigen::MatrixXd z =
            (out.completed.rowwise() - stats.mean.transpose()).array().rowwise() / scale.transpose().array();
        const auto [values, vectors] = sorted_eigen(z.transpose() * z);
        const Eigen::MatrixXd vk = vectors.leftCols(k);
        const Eigen::MatrixXd zhat = z * vk * vk.transpose();
        double delta = 0.0;
        for (const auto& [r, c] : missing) {
            const double next = zhat(r, c) * scale(c) + stats.mean(c);
            delta = std::max(delta, std::abs(next - out.completed(r, c)));
            out.completed(r, c) = next;
        }
        out.iterations = it;
        if (delta < options.tol) {
            out.converged = true;
            break;
        }
    }
    for (const auto& [r, c] : missing)
        out.imputed_cells.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), out.completed(r, c)});
    return out;
}

PcaResult pca(const Eigen::MatrixXd& data, std::vector<NbsId> row_ids, std::vector<FacetId> variable_ids) {
    const auto n = data.rows();
    const auto p = data.cols();
    if (n < 2 || p < 2) throw DomainError("pca: need at least 2 rows and 2 variables");
    if (static_cast<Eigen::Index>(row_ids.size()) != n || static_cast<Eigen::Index>(variable_ids.size()) != p)
        throw DomainError("pca: id lists do not match data shape");
    if (!data.allFinite()) throw DomainError("pca: data contains non-finite values");

    PcaResult out;
    const auto stats = column_stats(data);
    for (Eigen::Index c = 0; c < p; ++c)
        if (!(stats.sd(c) > 1e-12 * std::max(1.0, std::abs(stats.mean(c)))))
            throw DomainError("pca: variable '" + variable_ids[static_cast<std::size_t>(c)] +
                                  "' has zero variance and cannot be standardized",
                              variable_ids[static_cast<std::size_t>(c)]);
    const Eigen::MatrixXd z =
        (data.rowwise() - stats.mean.transpose()).array().rowwise() / stats.sd.transpose().array();
    const Eigen::MatrixXd corr = (z.transpose() * z) / static_cast<double>(n - 1);
    auto [values, vectors] = sorted_eigen(corr);
    values = values.cwiseMax(0.0);

    out.row_ids = std::move(row_ids);
    out.variable_ids = std::move(variable_ids);
    out.eigenvalues = values;
    out.loadings = vectors;
    out.component_scores = z * vectors;
    out.variance_fraction = values / values.sum();
    out.means = stats.mean;
    out.sds = stats.sd;
    return out;
}

PcaResult run_pca(const ScoreMatrix& matrix, const Catalogue& catalogue, const ImputeOptions& options) {
    const auto input = pretreat_for_pca(matrix, catalogue);
    const auto imputed = impute_iterative_pca(input, options);
    auto result = pca(imputed.completed, input.row_ids, input.variable_ids);
    result.imputed_cells = imputed.imputed_cells;
    result.imputation_iterations = imputed.iterations;
    result.imputation_converged = imputed.converged;
    return result;
}

// --- chi-square -------------------------------------------------------------

ChiSquareResult chi_square_one_sample(long long a, long long b) {
    if (a < 0 || b < 0) throw DomainError("chi_square_one_sample: counts must be non-negative");
    if (a + b == 0) throw DomainError("chi_square_one_sample: no observations (a + b = 0)");
    const double diff = static_cast<double>(a - b);
    ChiSquareResult r;
    r.statistic = diff * diff / static_cast<double>(a + b);
    // upper tail of chi-square with one degree of freedom
    r.p_value = std::erfc(std::sqrt(r.statistic / 2.0));
    return r;
}

}  // namespace nbs
