#include "nbs/snapshot.hpp"

#include <algorithm>

#include "nbs/error.hpp"

namespace nbs {

const NameDecision* Snapshot::decision(std::string_view nbs) const {
    const auto it = std::find_if(decisions.begin(), decisions.end(), [&](const NameDecision& d) { return d.nbs == nbs; });
    return it == decisions.end() ? nullptr : &*it;
}

std::shared_ptr<const Snapshot> build_snapshot(const std::filesystem::path& dir, std::uint64_t version,
                                               const SnapshotOptions& options) {
    auto s = std::make_shared<Snapshot>();
    s->version = version;
    s->data_dir = dir;
    s->catalogue = load_catalogue(dir, options.require_bundled_counts);
    const auto records = load_raw_scores(dir / "raw_scores.tsv");
    s->scores = compute_score_matrix(s->catalogue, records);
    for (const auto& id : s->scores.rows())
        if (!s->catalogue.find(id)) throw ValidationError("score row '" + id + "' is not in the catalogue", id);
    s->view = facet_view(s->scores, s->catalogue);
    s->impute_options = options.impute;
    s->pca_input = pretreat_for_pca(s->scores, s->catalogue);
    const auto imputed = impute_iterative_pca(s->pca_input, options.impute);
    s->pca = pca(imputed.completed, s->pca_input.row_ids, s->pca_input.variable_ids);
    s->pca.imputed_cells = imputed.imputed_cells;
    s->pca.imputation_iterations = imputed.iterations;
    s->pca.imputation_converged = imputed.converged;
    s->evenness = evenness_all(s->view);
    if (std::filesystem::exists(dir / "round1.tsv")) {
        s->consensus = load_consensus(dir);
        s->decisions = resolve_all(s->consensus, options.alpha);
    }
    return s;
}

}  // namespace nbs
