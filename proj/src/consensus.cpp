#include "nbs/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nbs/error.hpp"
#include "nbs/stats.hpp"
#include "nbs/tsv.hpp"

namespace nbs {

namespace {

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

std::string describe(const std::vector<VoteOption>& options) {
    std::string s;
    for (const auto& o : options) {
        if (!s.empty()) s += "; ";
        s += o.name + " " + fmt(o.percentage) + "%";
    }
    return s;
}

std::string describe(const std::vector<CitationCount>& candidates) {
    std::string s;
    for (const auto& c : candidates) {
        if (!s.empty()) s += "; ";
        s += c.candidate + " " + std::to_string(c.count);
        if (c.source == CandidateSource::ExpertSupplied) s += " (expert)";
        if (c.vetoed) s += " (vetoed: " + c.veto_reason + ")";
    }
    return s;
}

}  // namespace

std::string to_string(SurveyRound r) { return r == SurveyRound::One ? "One" : "Two"; }
std::string to_string(CandidateSource s) { return s == CandidateSource::Surveyed ? "Surveyed" : "ExpertSupplied"; }

void VoteTally::validate() const {
    if (options.empty()) throw DomainError(nbs + ": tally has no options", nbs);
    for (const auto& o : options)
        if (!(o.percentage >= 0.0)) throw DomainError(nbs + ": negative percentage for '" + o.name + "'", nbs);
    if (round == SurveyRound::Two) {
        if (options.size() != 2) throw DomainError(nbs + ": round-two tally must have exactly 2 options", nbs);
        if (!total_valid) throw DomainError(nbs + ": round-two tally lacks total valid votes", nbs);
    }
}

StageOutcome round1_select(const VoteTally& tally) {
    if (tally.round != SurveyRound::One) throw DomainError(tally.nbs + ": round1_select needs a round-one tally", tally.nbs);
    tally.validate();
    StageOutcome out;
    out.audit.stage = "round1";
    out.audit.inputs = describe(tally.options);
    out.audit.rule = "select the option with at least 50% of valid votes";

    std::vector<const VoteOption*> majority;
    for (const auto& o : tally.options)
        if (o.percentage >= 50.0) majority.push_back(&o);
    if (majority.size() > 1)
        throw DomainError(tally.nbs + ": round-one tie between '" + majority[0]->name + "' and '" + majority[1]->name + "'",
                          tally.nbs);
    if (majority.size() == 1) {
        out.selected = majority[0]->name;
        out.audit.outcome = "selected " + majority[0]->name;
        return out;
    }
    // Stable sort keeps file order among equal shares.
    std::vector<const VoteOption*> ranked;
    for (const auto& o : tally.options) ranked.push_back(&o);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const VoteOption* a, const VoteOption* b) { return a->percentage > b->percentage; });
    for (std::size_t i = 0; i < ranked.size() && i < 2; ++i) out.escalated.push_back(ranked[i]->name);
    out.audit.outcome = "escalate: no majority (top " + fmt(ranked[0]->percentage) + "%); carry " + out.escalated[0];
    if (out.escalated.size() > 1) out.audit.outcome += ", " + out.escalated[1];
    if (ranked.size() > 2 && ranked[1]->percentage == ranked[2]->percentage)
        out.audit.outcome += " (tie for second place broken by listing order)";
    return out;
}

std::pair<long long, long long> reconstruct_counts(double percentage_a, double percentage_b, int total_valid) {
    (void)percentage_b;
    if (total_valid < 1) throw DomainError("reconstruct_counts: total valid votes must be >= 1");
    const double a = std::round(percentage_a / 100.0 * static_cast<double>(total_valid));
    if (!(a >= 0.0 && a <= static_cast<double>(total_valid)))
        throw DomainError("reconstruct_counts: reconstructed count " + fmt(a) + " outside [0, " +
                          std::to_string(total_valid) + "]");
    const auto ai = static_cast<long long>(a);
    return {ai, total_valid - ai};
}

StageOutcome round2_test(const VoteTally& tally, double alpha) {
    if (tally.round != SurveyRound::Two) throw DomainError(tally.nbs + ": round2_test needs a round-two tally", tally.nbs);
    tally.validate();
    const auto& first = tally.options[0];
    const auto& second = tally.options[1];
    const auto [a, b] = reconstruct_counts(first.percentage, second.percentage, *tally.total_valid);
    const auto chi = chi_square_one_sample(a, b);

    StageOutcome out;
    out.audit.stage = "round2";
    out.audit.inputs = describe(tally.options) + "; total valid " + std::to_string(*tally.total_valid) + " -> counts " +
                       std::to_string(a) + "/" + std::to_string(b);
    out.audit.rule = "one-sample chi-square against 50/50, select majority if p < " + fmt(alpha);
    const std::string stats = "X2=" + fmt(chi.statistic) + " p=" + fmt(chi.p_value, 3);
    if (chi.p_value < alpha && a != b) {
        out.selected = a > b ? first.name : second.name;
        out.audit.outcome = stats + "; selected " + *out.selected;
    } else {
        out.escalated = {first.name, second.name};
        out.audit.outcome = stats + "; escalate: no significant difference";
    }
    return out;
}

ArbitrationOutcome citation_arbitrate(const std::vector<CitationCount>& candidates) {
    ArbitrationOutcome out;
    out.audit.stage = "citations";
    out.audit.inputs = describe(candidates);

    std::vector<const CitationCount*> survivors;
    for (const auto& c : candidates) {
        if (c.vetoed && c.veto_reason.empty())
            throw DomainError("citation_arbitrate: veto on '" + c.candidate + "' has no reason");
        if (c.count < 0) throw DomainError("citation_arbitrate: negative count for '" + c.candidate + "'");
        if (!c.vetoed) survivors.push_back(&c);
    }
    if (survivors.empty()) throw DomainError("citation_arbitrate: every candidate is vetoed");

    // First-listed wins among equal counts.
    auto pick = [](const std::vector<const CitationCount*>& pool, bool& tied) {
        const CitationCount* best = nullptr;
        tied = false;
        for (const auto* c : pool) {
            if (!best || c->count > best->count) {
                best = c;
                tied = false;
            } else if (c->count == best->count) {
                tied = true;
            }
        }
        return best;
    };

    std::vector<const CitationCount*> eligible;
    for (const auto* c : survivors)
        if (c->source == CandidateSource::Surveyed && c->count >= 10) eligible.push_back(c);

    bool tied = false;
    const CitationCount* winner = nullptr;
    if (!eligible.empty()) {
        winner = pick(eligible, tied);
        // A veto that removed the better-cited name means the result rests on
        // the experts' distinguishability judgement rather than on counts.
        const CitationCount* displaced = nullptr;
        for (const auto& c : candidates)
            if (c.vetoed && c.count > winner->count && (!displaced || c.count > displaced->count)) displaced = &c;
        if (displaced) {
            out.path = NameProvenance::ExpertOverride;
            out.audit.rule = "vetoed candidate '" + displaced->candidate +
                             "' would have won; best remaining surveyed name with at least 10 articles";
        } else {
            out.path = NameProvenance::CitationArbitration;
            out.audit.rule = "surveyed name with the most articles (at least 10)";
        }
    } else {
        winner = pick(survivors, tied);
        const bool has_expert = std::any_of(survivors.begin(), survivors.end(), [](const CitationCount* c) {
            return c->source == CandidateSource::ExpertSupplied;
        });
        if (has_expert) {
            out.path = NameProvenance::ExpertOverride;
            out.audit.rule = "no surveyed name reaches 10 articles; most-cited among all candidates incl. expert-supplied";
        } else {
            out.path = NameProvenance::CitationArbitration;
            out.audit.rule = "no name reaches 10 articles and no expert candidate; most-cited surveyed name";
        }
    }
    out.final_name = winner->candidate;
    out.audit.outcome = "selected " + winner->candidate;
    if (tied) out.audit.outcome += " (warning: tie on count broken by listing order)";
    return out;
}

NameDecision resolve_name(std::string_view nbs, const ConsensusInputs& inputs, double alpha) {
    NameDecision d;
    d.nbs = std::string(nbs);
    const auto r1 = inputs.round1.find(nbs);
    if (r1 == inputs.round1.end()) throw NotFoundError("no round-one tally for " + d.nbs, d.nbs);
    auto first = round1_select(r1->second);
    d.audit.push_back(first.audit);
    if (!first.escalates()) {
        d.final_name = *first.selected;
        d.path = NameProvenance::Round1;
        return d;
    }

    const auto r2 = inputs.round2.find(nbs);
    if (r2 == inputs.round2.end()) throw DomainError(d.nbs + ": escalated to round two but no round-two tally", d.nbs);
    auto second = round2_test(r2->second, alpha);
    d.audit.push_back(second.audit);
    if (!second.escalates()) {
        d.final_name = *second.selected;
        d.path = NameProvenance::Round2;
        return d;
    }

    const auto cit = inputs.citations.find(nbs);
    if (cit == inputs.citations.end() || cit->second.empty())
        throw DomainError(d.nbs + ": escalated to citation arbitration but no citation data", d.nbs);
    auto third = citation_arbitrate(cit->second);
    d.audit.push_back(third.audit);
    d.final_name = third.final_name;
    d.path = third.path;
    return d;
}

std::vector<NameDecision> resolve_all(const ConsensusInputs& inputs, double alpha) {
    std::vector<NameDecision> out;
    out.reserve(inputs.round1.size());
    for (const auto& [id, tally] : inputs.round1) out.push_back(resolve_name(id, inputs, alpha));
    return out;
}

ConsensusInputs load_consensus(const std::filesystem::path& dir) {
    ConsensusInputs in;
    {
        const auto t = TsvTable::read(dir / "round1.tsv");
        const auto c_nbs = t.column("nbs"), c_opt = t.column("option"), c_pct = t.column("percentage");
        const auto c_bucket = t.has_column("bucket") ? std::optional(t.column("bucket")) : std::nullopt;
        for (const auto& row : t.rows()) {
            const auto& id = t.cell(row, c_nbs);
            auto& tally = in.round1[id];
            tally.nbs = id;
            tally.round = SurveyRound::One;
            if (c_bucket && t.flag(row, *c_bucket)) continue;
            const double pct = t.real(row, c_pct);
            if (pct < 0.0) t.fail(row, c_pct, "negative percentage");
            tally.options.push_back({t.cell(row, c_opt), pct});
        }
    }
    {
        const auto t = TsvTable::read(dir / "round2.tsv");
        const auto c_nbs = t.column("nbs"), c_opt = t.column("option"), c_pct = t.column("percentage"),
                   c_tot = t.column("total_valid");
        for (const auto& row : t.rows()) {
            const auto& id = t.cell(row, c_nbs);
            auto& tally = in.round2[id];
            tally.nbs = id;
            tally.round = SurveyRound::Two;
            const auto total = static_cast<int>(t.integer(row, c_tot));
            if (tally.total_valid && *tally.total_valid != total) t.fail(row, c_tot, "inconsistent total for " + id);
            tally.total_valid = total;
            tally.options.push_back({t.cell(row, c_opt), t.real(row, c_pct)});
            if (tally.options.size() > 2) t.fail(row, c_opt, "more than two round-two options for " + id);
        }
    }
    {
        const auto t = TsvTable::read(dir / "citations.tsv");
        const auto c_nbs = t.column("nbs"), c_cand = t.column("candidate"), c_count = t.column("count"),
                   c_src = t.column("source"), c_veto = t.column("vetoed"), c_reason = t.column("veto_reason");
        for (const auto& row : t.rows()) {
            CitationCount c;
            c.candidate = t.cell(row, c_cand);
            c.count = t.integer(row, c_count);
            if (c.count < 0) t.fail(row, c_count, "negative count");
            const auto& src = t.cell(row, c_src);
            if (src == "Surveyed") c.source = CandidateSource::Surveyed;
            else if (src == "ExpertSupplied") c.source = CandidateSource::ExpertSupplied;
            else t.fail(row, c_src, "expected Surveyed or ExpertSupplied");
            c.vetoed = t.flag(row, c_veto);
            c.veto_reason = t.cell(row, c_reason);
            if (c.vetoed && c.veto_reason.empty()) t.fail(row, c_reason, "veto without a reason");
            in.citations[t.cell(row, c_nbs)].push_back(std::move(c));
        }
    }
    return in;
}

void write_decision(std::ostream& out, const NameDecision& decision) {
    out << decision.nbs << '\t' << decision.final_name << '\t' << to_string(decision.path) << '\n';
    for (const auto& step : decision.audit)
        out << "  [" << step.stage << "] inputs: " << step.inputs << "\n"
            << "  [" << step.stage << "] rule: " << step.rule << "\n"
            << "  [" << step.stage << "] outcome: " << step.outcome << "\n";
}

}  // namespace nbs
