#include "nbs/export.hpp"

#include <fstream>
#include <functional>

#include "nbs/error.hpp"
#include "nbs/tsv.hpp"

namespace nbs {

namespace {

std::string num(const std::optional<double>& v) { return v ? format_sig(*v) : std::string(); }

std::string component_header(std::size_t p) {
    std::string s;
    for (std::size_t i = 1; i <= p; ++i) s += "\tPC" + std::to_string(i);
    return s;
}

}  // namespace

void write_profiles(std::ostream& out, const Catalogue& catalogue, const ScoreMatrix& matrix) {
    out << "nbs\tname\tkind\tes_category\tfacet\tvalue\tunassessed\n";
    const auto view = facet_view(matrix, catalogue);
    for (const auto& id : matrix.rows()) {
        const auto p = profile(catalogue, matrix, id);
        auto emit = [&](std::string_view kind, std::string_view cat, const FacetId& facet, const std::optional<double>& v) {
            out << p.nbs << '\t' << p.name << '\t' << kind << '\t' << cat << '\t' << facet << '\t' << num(v) << '\t'
                << (v ? 0 : 1) << '\n';
        };
        for (const auto& [facet, v] : p.uc_scores) emit("UrbanChallenge", "", facet, v);
        for (const auto& [facet, v] : p.es_scores)
            emit("EcosystemService", to_string(*catalogue.find_facet(facet)->es_category), facet, v);
        for (const auto& [cat, v] : p.es_category_means) emit("EsCategoryMean", to_string(cat), es_category_column(cat), v);
    }
}

void write_facet_summaries(std::ostream& out, const Catalogue& catalogue, const ScoreMatrix& matrix) {
    out << "facet\tkind\tcount_nonmissing\tmedian\tmean\n";
    auto emit = [&](const ScoreMatrix& m, const FacetId& id, std::string_view kind) {
        const auto c = m.col_index(id);
        if (!c) return;
        int n = 0;
        for (const auto& v : m.column(*c)) n += v ? 1 : 0;
        out << id << '\t' << kind << '\t' << n;
        if (n > 0) {
            const auto s = facet_summary(m, id);
            out << '\t' << format_sig(s.median) << '\t' << format_sig(s.mean);
        } else {
            out << "\t\t";
        }
        out << '\n';
    };
    for (const auto& f : catalogue.facets()) emit(matrix, f.id, to_string(f.kind));
    const auto view = facet_view(matrix, catalogue);
    for (auto cat : kEsCategories) emit(view, es_category_column(cat), "EsCategoryMean");
}

void write_rankings(std::ostream& out, const Catalogue& catalogue, std::span<const RankedList> lists) {
    out << "target\trank\tnbs\tname\tvalue\tunassessed\n";
    for (const auto& list : lists) {
        std::string target;
        switch (list.request.target) {
            case RankTarget::Facet: target = list.request.facet; break;
            case RankTarget::Category: target = es_category_column(list.request.category); break;
            case RankTarget::Weighted: {
                for (const auto& [id, w] : list.request.weights)
                    target += (target.empty() ? "" : ",") + id + "=" + format_roundtrip(w);
                break;
            }
        }
        int position = 0;
        for (const auto& e : list.entries) {
            const auto* entry = catalogue.find(e.nbs);
            out << target << '\t' << ++position << '\t' << e.nbs << '\t' << (entry ? entry->final_name : "") << '\t'
                << format_sig(e.value) << '\t' << (e.unassessed ? 1 : 0) << '\n';
        }
    }
}

void write_evenness(std::ostream& out, const Catalogue& catalogue, std::span<const EvennessResult> results) {
    out << "nbs\tname\tdiversity\tfacet_count\tevenness\n";
    for (const auto& r : results) {
        const auto* entry = catalogue.find(r.nbs);
        out << r.nbs << '\t' << (entry ? entry->final_name : "") << '\t' << format_sig(r.diversity) << '\t'
            << r.facet_count << '\t' << num(r.evenness) << '\n';
    }
}

void write_pca_eigen(std::ostream& out, const PcaResult& pca) {
    out << "component\teigenvalue\tvariance_fraction\tcumulative_fraction\n";
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < pca.eigenvalues.size(); ++i) {
        cumulative += pca.variance_fraction(i);
        out << "PC" << i + 1 << '\t' << format_sig(pca.eigenvalues(i)) << '\t' << format_sig(pca.variance_fraction(i))
            << '\t' << format_sig(cumulative) << '\n';
    }
}

void write_pca_scores(std::ostream& out, const PcaResult& pca, const Catalogue& catalogue) {
    out << "nbs\tcolor_key" << component_header(pca.component_count()) << '\n';
    for (std::size_t r = 0; r < pca.row_ids.size(); ++r) {
        const auto& id = pca.row_ids[r];
        const auto* entry = catalogue.find(id);
        out << id << '\t' << (entry ? catalogue.taxonomy().ancestor_at_level(entry->taxonomy_leaf, 2) : "");
        for (Eigen::Index c = 0; c < pca.component_scores.cols(); ++c)
            out << '\t' << format_sig(pca.component_scores(static_cast<Eigen::Index>(r), c));
        out << '\n';
    }
}

void write_pca_loadings(std::ostream& out, const PcaResult& pca) {
    out << "variable" << component_header(pca.component_count()) << '\n';
    for (std::size_t v = 0; v < pca.variable_ids.size(); ++v) {
        out << pca.variable_ids[v];
        for (Eigen::Index c = 0; c < pca.loadings.cols(); ++c)
            out << '\t' << format_sig(pca.loadings(static_cast<Eigen::Index>(v), c));
        out << '\n';
    }
}

void write_names(std::ostream& out, std::span<const NameDecision> decisions) {
    out << "nbs\tfinal_name\tpath\n";
    for (const auto& d : decisions) out << d.nbs << '\t' << d.final_name << '\t' << to_string(d.path) << '\n';
}

std::vector<RankedList> standard_rankings(const Catalogue& catalogue, const ScoreMatrix& matrix, int top_n) {
    std::vector<RankedList> out;
    for (const auto& id : catalogue.facet_ids(FacetKind::UrbanChallenge))
        if (matrix.col_index(id)) out.push_back(rank(catalogue, matrix, RankingRequest::for_facet(id, top_n)));
    for (auto cat : kEsCategories) out.push_back(rank(catalogue, matrix, RankingRequest::for_category(cat, top_n)));
    return out;
}

std::vector<std::filesystem::path> export_plot_tables(const std::filesystem::path& dir, const ExportInputs& in) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto file = [&](const char* name, const std::function<void(std::ostream&)>& body) {
        const auto path = dir / name;
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path.string());
        body(out);
        if (!out) throw Error("write failed for " + path.string());
        written.push_back(path);
    };
    file("scores.tsv", [&](std::ostream& o) { write_score_matrix(o, in.scores); });
    file("facet_view.tsv", [&](std::ostream& o) { write_score_matrix(o, facet_view(in.scores, in.catalogue)); });
    file("profiles.tsv", [&](std::ostream& o) { write_profiles(o, in.catalogue, in.scores); });
    file("facet_summary.tsv", [&](std::ostream& o) { write_facet_summaries(o, in.catalogue, in.scores); });
    const auto lists = standard_rankings(in.catalogue, in.scores, in.top_n);
    file("rankings.tsv", [&](std::ostream& o) { write_rankings(o, in.catalogue, lists); });
    file("evenness.tsv", [&](std::ostream& o) { write_evenness(o, in.catalogue, in.evenness); });
    file("pca_eigen.tsv", [&](std::ostream& o) { write_pca_eigen(o, in.pca); });
    file("pca_scores.tsv", [&](std::ostream& o) { write_pca_scores(o, in.pca, in.catalogue); });
    file("pca_loadings.tsv", [&](std::ostream& o) { write_pca_loadings(o, in.pca); });
    if (!in.decisions.empty()) file("names.tsv", [&](std::ostream& o) { write_names(o, in.decisions); });
    return written;
}

}  // namespace nbs
