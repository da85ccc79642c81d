#include "nbs/scoring.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

#include "nbs/error.hpp"
#include "nbs/tsv.hpp"

namespace nbs {

ScoreMatrix::ScoreMatrix(std::vector<NbsId> rows, std::vector<FacetId> cols)
    : rows_(std::move(rows)), cols_(std::move(cols)), cells_(rows_.size() * cols_.size()) {}

std::optional<std::size_t> ScoreMatrix::row_index(std::string_view id) const {
    auto it = std::find(rows_.begin(), rows_.end(), id);
    if (it == rows_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - rows_.begin());
}

std::optional<std::size_t> ScoreMatrix::col_index(std::string_view id) const {
    auto it = std::find(cols_.begin(), cols_.end(), id);
    if (it == cols_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - cols_.begin());
}

const std::optional<double>& ScoreMatrix::cell(std::string_view nbs, std::string_view facet) const {
    auto r = row_index(nbs);
    if (!r) throw NotFoundError("score matrix has no row '" + std::string(nbs) + "'", std::string(nbs));
    auto c = col_index(facet);
    if (!c) throw NotFoundError("score matrix has no column '" + std::string(facet) + "'", std::string(facet));
    return at(*r, *c);
}

std::vector<std::optional<double>> ScoreMatrix::row(std::size_t r) const {
    return {cells_.begin() + static_cast<std::ptrdiff_t>(r * cols_.size()),
            cells_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_.size())};
}

std::vector<std::optional<double>> ScoreMatrix::column(std::size_t c) const {
    std::vector<std::optional<double>> out;
    out.reserve(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) out.push_back(at(r, c));
    return out;
}

BaselineValue map_to_baseline(const RawScoreRecord& record, const Crosswalk& crosswalk) {
    if (record.value != 0 && record.value != 1)
        throw DomainError("raw score must be 0 or 1, got " + std::to_string(record.value),
                          record.project + "/" + record.source_nbs_label);
    const auto* rule = crosswalk.find(record.project, record.project_facet_label);
    if (!rule)
        throw DomainError("no crosswalk for label '" + record.project_facet_label + "' of project " + record.project,
                          record.project + "/" + record.project_facet_label);
    return {rule->baseline_facet, record.value};
}

NormalizedScore normalize_project(std::string_view project, std::string_view nbs, std::string_view facet,
                                  std::span<const RawScoreRecord> records, const Crosswalk& crosswalk) {
    NormalizedScore out{std::string(project), std::string(nbs), std::string(facet), std::nullopt};
    if (records.empty()) return out;
    int sum = 0;
    for (const auto& r : records) {
        if (r.project != project)
            throw DomainError("normalize_project: records mix projects '" + std::string(project) + "' and '" +
                                  r.project + "'",
                              r.project);
        const auto mapped = map_to_baseline(r, crosswalk);
        if (mapped.facet != facet)
            throw DomainError("normalize_project: label '" + r.project_facet_label + "' maps to '" + mapped.facet +
                                  "', not '" + std::string(facet) + "'",
                              r.project_facet_label);
        sum += mapped.value;
    }
    out.value = static_cast<double>(sum) / static_cast<double>(records.size());
    return out;
}

ScoreMatrix cross_scores(std::span<const NormalizedScore> normalized, std::vector<NbsId> rows,
                         std::vector<FacetId> cols) {
    ScoreMatrix m(std::move(rows), std::move(cols));
    std::vector<double> sum(m.row_count() * m.col_count(), 0.0);
    std::vector<int> count(sum.size(), 0);
    for (const auto& s : normalized) {
        auto r = m.row_index(s.nbs);
        if (!r) throw ValidationError("normalized score references unknown NBS '" + s.nbs + "'", s.nbs);
        auto c = m.col_index(s.facet);
        if (!c) throw ValidationError("normalized score references unknown facet '" + s.facet + "'", s.facet);
        if (!s.value) continue;
        const auto k = *r * m.col_count() + *c;
        sum[k] += *s.value;
        ++count[k];
    }
    for (std::size_t r = 0; r < m.row_count(); ++r)
        for (std::size_t c = 0; c < m.col_count(); ++c) {
            const auto k = r * m.col_count() + c;
            if (count[k] > 0) m.at(r, c) = sum[k] / count[k];
        }
    return m;
}

ScoreMatrix compute_score_matrix(const Catalogue& catalogue, std::span<const RawScoreRecord> records) {
    // (project, nbs, facet) -> contributing records
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<RawScoreRecord>> groups;
    for (const auto& rec : records) {
        const auto mapped = map_to_baseline(rec, catalogue.crosswalk());
        const auto targets = catalogue.nbs_for_label(rec.project, rec.source_nbs_label);
        if (targets.empty())
            throw DomainError("raw score for '" + rec.source_nbs_label + "' (" + rec.project +
                                  ") matches no catalogue NBS",
                              rec.project + "/" + rec.source_nbs_label);
        for (const auto& nbs : targets) groups[{rec.project, nbs, mapped.facet}].push_back(rec);
    }
    std::vector<NormalizedScore> normalized;
    normalized.reserve(groups.size());
    for (const auto& [key, recs] : groups) {
        const auto& [project, nbs, facet] = key;
        normalized.push_back(normalize_project(project, nbs, facet, recs, catalogue.crosswalk()));
    }
    return cross_scores(normalized, catalogue.ids(), catalogue.facet_ids());
}

double median(std::vector<double> values) {
    if (values.empty()) throw DomainError("median of empty sample");
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

FacetSummary facet_summary(const ScoreMatrix& matrix, std::string_view facet) {
    auto c = matrix.col_index(facet);
    if (!c) throw NotFoundError("score matrix has no column '" + std::string(facet) + "'", std::string(facet));
    std::vector<double> present;
    for (const auto& v : matrix.column(*c))
        if (v) present.push_back(*v);
    if (present.empty()) throw DomainError("no data for facet '" + std::string(facet) + "'", std::string(facet));
    FacetSummary s;
    s.facet = std::string(facet);
    s.count_nonmissing = static_cast<int>(present.size());
    s.mean = std::accumulate(present.begin(), present.end(), 0.0) / static_cast<double>(present.size());
    s.median = median(std::move(present));
    return s;
}

ScoreMatrix facet_view(const ScoreMatrix& matrix, const Catalogue& catalogue) {
    std::vector<FacetId> cols;
    std::vector<std::size_t> uc_src;
    std::array<std::vector<std::size_t>, 4> es_src;
    for (std::size_t c = 0; c < matrix.col_count(); ++c) {
        const auto* f = catalogue.find_facet(matrix.cols()[c]);
        if (!f) throw ValidationError("score column '" + matrix.cols()[c] + "' is not a catalogue facet");
        if (f->kind == FacetKind::UrbanChallenge) {
            uc_src.push_back(c);
            cols.push_back(f->id);
        } else {
            es_src[static_cast<std::size_t>(*f->es_category)].push_back(c);
        }
    }
    std::vector<std::size_t> cats;
    for (std::size_t k = 0; k < es_src.size(); ++k)
        if (!es_src[k].empty()) {
            cats.push_back(k);
            cols.push_back(es_category_column(kEsCategories[k]));
        }
    ScoreMatrix out(matrix.rows(), std::move(cols));
    for (std::size_t r = 0; r < matrix.row_count(); ++r) {
        std::size_t oc = 0;
        for (auto c : uc_src) out.at(r, oc++) = matrix.at(r, c);
        for (auto k : cats) {
            double sum = 0;
            int n = 0;
            for (auto c : es_src[k])
                if (const auto& v = matrix.at(r, c)) {
                    sum += *v;
                    ++n;
                }
            if (n > 0) out.at(r, oc) = sum / n;
            ++oc;
        }
    }
    return out;
}

std::vector<RawScoreRecord> load_raw_scores(const std::filesystem::path& path) {
    auto t = TsvTable::read(path);
    const auto c_p = t.column("project"), c_s = t.column("source_nbs_label"), c_f = t.column("project_facet_label"),
               c_v = t.column("value");
    std::vector<RawScoreRecord> out;
    out.reserve(t.rows().size());
    for (const auto& r : t.rows()) {
        const auto v = t.integer(r, c_v);
        if (v != 0 && v != 1) t.fail(r, c_v, "raw score must be 0 or 1");
        out.push_back({t.cell(r, c_p), t.cell(r, c_s), t.cell(r, c_f), static_cast<int>(v)});
    }
    return out;
}

void write_raw_scores(const std::filesystem::path& path, std::span<const RawScoreRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "project\tsource_nbs_label\tproject_facet_label\tvalue\n";
    for (const auto& r : records)
        out << r.project << '\t' << r.source_nbs_label << '\t' << r.project_facet_label << '\t' << r.value << '\n';
}

void write_score_matrix(std::ostream& out, const ScoreMatrix& matrix) {
    out << "nbs";
    for (const auto& c : matrix.cols()) out << '\t' << c;
    out << '\n';
    for (std::size_t r = 0; r < matrix.row_count(); ++r) {
        out << matrix.rows()[r];
        for (std::size_t c = 0; c < matrix.col_count(); ++c) {
            out << '\t';
            if (const auto& v = matrix.at(r, c)) out << format_roundtrip(*v);
        }
        out << '\n';
    }
}

void write_score_matrix(const std::filesystem::path& path, const ScoreMatrix& matrix) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_score_matrix(out, matrix);
}

ScoreMatrix read_score_matrix(const std::filesystem::path& path) {
    auto t = TsvTable::read(path);
    if (t.header().empty() || t.header().front() != "nbs")
        throw ParseError(path.string(), 1, "nbs", "first column must be 'nbs'");
    std::vector<FacetId> cols(t.header().begin() + 1, t.header().end());
    std::set<std::string> seen(cols.begin(), cols.end());
    if (seen.size() != cols.size()) throw ParseError(path.string(), 1, "-", "duplicate column id");
    std::vector<NbsId> rows;
    for (const auto& r : t.rows()) rows.push_back(t.cell(r, 0));
    ScoreMatrix m(rows, cols);
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
        const auto& r = t.rows()[i];
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (t.cell(r, c + 1).empty()) continue;
            const double v = t.real(r, c + 1);
            if (v < 0.0 || v > 1.0) t.fail(r, c + 1, "score outside [0,1]");
            m.at(i, c) = v;
        }
    }
    return m;
}

}  // namespace nbs
