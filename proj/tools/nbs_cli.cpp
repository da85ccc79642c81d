// nbs: batch driver for the NBS catalogue, scoring and statistics.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "nbs/catalogue.hpp"
#include "nbs/consensus.hpp"
#include "nbs/error.hpp"
#include "nbs/export.hpp"
#include "nbs/json_codec.hpp"
#include "nbs/query.hpp"
#include "nbs/scoring.hpp"
#include "nbs/service.hpp"
#include "nbs/stats.hpp"
#include "nbs/tsv.hpp"

#ifndef NBS_DATA_DIR
#define NBS_DATA_DIR "data/bundled"
#endif

namespace {

struct Options {
    std::string data = "bundled";
    std::string out;
    std::string format = "table";
    std::string scores;
    bool allow_partial = false;
    double alpha = 0.05;
    int k = 2;
    double tol = 1e-8;
    int max_iter = 1000;
    int top_n = 10;
    std::string facet;
    std::string weights;
    std::string filter;
    std::string nbs = "all";
    long long chi_a = 0;
    long long chi_b = 0;
    std::string host = "127.0.0.1";
    int port = 8080;
};

std::filesystem::path data_dir(const Options& o) {
    return o.data == "bundled" ? std::filesystem::path(NBS_DATA_DIR) : std::filesystem::path(o.data);
}

nbs::Catalogue catalogue(const Options& o) { return nbs::load_catalogue(data_dir(o), false); }

nbs::ScoreMatrix scores(const Options& o, const nbs::Catalogue& cat) {
    if (!o.scores.empty()) return nbs::read_score_matrix(o.scores);
    return nbs::compute_score_matrix(cat, nbs::load_raw_scores(data_dir(o) / "raw_scores.tsv"));
}

nbs::ImputeOptions impute_options(const Options& o) { return {o.k, o.tol, o.max_iter}; }

bool structured(const Options& o) { return o.format == "structured"; }

// Writes to --out when given, stdout otherwise.
void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw nbs::Error("cannot write " + o.out);
    f << text;
}

std::string dump(const nbs::Json& j) { return j.dump(2) + "\n"; }

int cmd_validate(const Options& o) {
    const auto dir = data_dir(o);
    const auto cat = nbs::load_catalogue(dir, !o.allow_partial);
    const auto records = nbs::load_raw_scores(dir / "raw_scores.tsv");
    const auto m = nbs::compute_score_matrix(cat, records);
    std::size_t decisions = 0;
    if (std::filesystem::exists(dir / "round1.tsv")) decisions = nbs::resolve_all(nbs::load_consensus(dir), o.alpha).size();
    std::ostringstream s;
    s << "ok: " << cat.entries().size() << " NBS, " << cat.facet_ids(nbs::FacetKind::UrbanChallenge).size()
      << " UC facets, " << cat.facet_ids(nbs::FacetKind::EcosystemService).size() << " ES facets, "
      << cat.taxonomy().nodes().size() << " taxonomy nodes, " << cat.crosswalk().rules().size() << " crosswalk rules, "
      << records.size() << " score records (" << m.row_count() << "x" << m.col_count() << "), " << decisions
      << " name decisions\n";
    emit(o, s.str());
    return 0;
}

int cmd_score(const Options& o) {
    const auto cat = catalogue(o);
    const auto m = scores(o, cat);
    std::ostringstream s;
    if (structured(o)) s << dump(nbs::to_json(m));
    else nbs::write_score_matrix(s, m);
    emit(o, s.str());
    return 0;
}

int cmd_evenness(const Options& o) {
    const auto cat = catalogue(o);
    const auto view = nbs::facet_view(scores(o, cat), cat);
    std::vector<nbs::EvennessResult> results;
    if (o.nbs == "all") results = nbs::evenness_all(view);
    else results.push_back(nbs::evenness(o.nbs, view));
    std::ostringstream s;
    if (structured(o)) {
        nbs::Json list = nbs::Json::array();
        for (const auto& r : results) list.push_back(nbs::to_json(r));
        s << dump(list);
    } else {
        nbs::write_evenness(s, cat, results);
    }
    emit(o, s.str());
    return 0;
}

int cmd_pca(const Options& o) {
    const auto cat = catalogue(o);
    const auto m = scores(o, cat);
    const auto input = nbs::pretreat_for_pca(m, cat);
    const auto result = nbs::run_pca(m, cat, impute_options(o));
    std::ostringstream s;
    if (structured(o)) {
        s << dump(nbs::to_json(result, input.dropped));
    } else {
        s << "# variables: " << result.variable_ids.size() << "; dropped:";
        for (const auto& d : input.dropped) s << ' ' << d;
        s << "; imputed cells: " << result.imputed_cells.size() << "; iterations: " << result.imputation_iterations
          << (result.imputation_converged ? "" : " (not converged)") << '\n';
        nbs::write_pca_eigen(s, result);
        s << '\n';
        nbs::write_pca_scores(s, result, cat);
    }
    emit(o, s.str());
    return result.imputation_converged ? 0 : 1;
}

int cmd_chisq(const Options& o) {
    const auto r = nbs::chi_square_one_sample(o.chi_a, o.chi_b);
    char buf[96];
    std::snprintf(buf, sizeof buf, "X2=%.2f p=%.2g\n", r.statistic, r.p_value);
    emit(o, structured(o) ? dump(nbs::to_json(r)) : std::string(buf));
    return 0;
}

int cmd_names(const Options& o) {
    const auto decisions = nbs::resolve_all(nbs::load_consensus(data_dir(o)), o.alpha);
    std::ostringstream s;
    if (structured(o)) {
        nbs::Json list = nbs::Json::array();
        for (const auto& d : decisions) list.push_back(nbs::to_json(d));
        s << dump(list);
    } else {
        for (const auto& d : decisions) nbs::write_decision(s, d);
    }
    emit(o, s.str());
    return 0;
}

int cmd_rank(const Options& o) {
    const auto cat = catalogue(o);
    const auto m = scores(o, cat);
    if (o.facet.empty() == o.weights.empty()) throw nbs::ValidationError("give exactly one of --facet or --weights");
    auto request = o.facet.empty() ? nbs::RankingRequest::weighted(nbs::parse_weights(o.weights))
                                   : nbs::ranking_request_for_target(o.facet);
    request.top_n = o.top_n;
    if (!o.filter.empty()) request.filter = o.filter;
    const auto list = nbs::rank(cat, m, request);
    std::ostringstream s;
    if (structured(o)) s << dump(nbs::to_json(list, cat));
    else nbs::write_rankings(s, cat, std::span(&list, 1));
    emit(o, s.str());
    return 0;
}

int cmd_export(const Options& o) {
    if (o.out.empty()) throw nbs::ValidationError("export needs --out <directory>");
    const auto dir = data_dir(o);
    const auto cat = catalogue(o);
    const auto m = scores(o, cat);
    const auto result = nbs::run_pca(m, cat, impute_options(o));
    const auto even = nbs::evenness_all(nbs::facet_view(m, cat));
    std::vector<nbs::NameDecision> decisions;
    if (std::filesystem::exists(dir / "round1.tsv")) decisions = nbs::resolve_all(nbs::load_consensus(dir), o.alpha);
    const auto files = nbs::export_plot_tables(o.out, {cat, m, result, even, decisions, o.top_n});
    for (const auto& f : files) std::cout << f.string() << '\n';
    return 0;
}

int cmd_serve(const Options& o) {
    nbs::ServiceConfig config;
    config.host = o.host;
    config.port = o.port;
    config.data_dir = data_dir(o);
    config.snapshot.impute = impute_options(o);
    config.snapshot.alpha = o.alpha;
    nbs::Service service(config);
    std::cerr << "serving " << config.data_dir.string() << " on " << o.host << ":" << o.port << '\n';
    service.run();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NBS catalogue, scoring and statistics"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--data", o.data, "data directory, or 'bundled'");
    app.add_option("--out", o.out, "output file (directory for export)");
    app.add_option("--format", o.format, "table or structured")->check(CLI::IsMember({"table", "structured"}));
    app.add_option("--scores", o.scores, "score matrix TSV to use instead of raw scores");
    app.add_option("--alpha", o.alpha, "round-two significance level")->check(CLI::Range(0.0, 1.0));
    app.add_option("--k", o.k, "components used by imputation");
    app.add_option("--tol", o.tol, "imputation convergence tolerance");
    app.add_option("--max-iter", o.max_iter, "imputation iteration cap");

    auto* validate = app.add_subcommand("validate", "check every catalogue and data invariant");
    validate->add_flag("--allow-partial", o.allow_partial, "skip the bundled cardinality checks");
    app.add_subcommand("score", "emit the crossed score matrix");
    auto* even = app.add_subcommand("evenness", "Shannon diversity and evenness per NBS");
    even->add_option("--nbs", o.nbs, "NBS id or 'all'");
    app.add_subcommand("pca", "imputed standardized PCA");
    auto* chisq = app.add_subcommand("chisq", "one-sample chi-square on two counts");
    chisq->add_option("a", o.chi_a)->required()->check(CLI::NonNegativeNumber);
    chisq->add_option("b", o.chi_b)->required()->check(CLI::NonNegativeNumber);
    app.add_subcommand("names", "replay the terminology decisions with audits");
    auto* rank = app.add_subcommand("rank", "rank NBS by a facet, ES category or weights");
    rank->add_option("--facet", o.facet, "facet id or ES category");
    rank->add_option("--weights", o.weights, "facet=weight,...");
    rank->add_option("--filter", o.filter, "taxonomy code");
    rank->add_option("--top-n", o.top_n)->check(CLI::PositiveNumber);
    auto* exp = app.add_subcommand("export", "write plot-data tables under --out");
    exp->add_option("--top-n", o.top_n)->check(CLI::PositiveNumber);
    auto* serve = app.add_subcommand("serve", "start the HTTP service");
    serve->add_option("--host", o.host);
    serve->add_option("--port", o.port);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto* sub = app.get_subcommands().front();
        const auto& name = sub->get_name();
        if (name == "validate") return cmd_validate(o);
        if (name == "score") return cmd_score(o);
        if (name == "evenness") return cmd_evenness(o);
        if (name == "pca") return cmd_pca(o);
        if (name == "chisq") return cmd_chisq(o);
        if (name == "names") return cmd_names(o);
        if (name == "rank") return cmd_rank(o);
        if (name == "export") return cmd_export(o);
        if (name == "serve") return cmd_serve(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
