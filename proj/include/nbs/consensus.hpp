#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nbs/catalogue.hpp"

namespace nbs {

enum class SurveyRound { One, Two };

struct VoteOption {
    std::string name;
    double percentage = 0.0;
};

// Options keep their file order, which breaks ties.
struct VoteTally {
    NbsId nbs;
    SurveyRound round = SurveyRound::One;
    std::vector<VoteOption> options;
    std::optional<int> total_valid;  // round Two only

    void validate() const;  // DomainError
};

enum class CandidateSource { Surveyed, ExpertSupplied };

struct CitationCount {
    std::string candidate;
    long long count = 0;
    CandidateSource source = CandidateSource::Surveyed;
    bool vetoed = false;
    std::string veto_reason;
};

struct AuditStep {
    std::string stage;    // "round1", "round2", "citations"
    std::string inputs;
    std::string rule;
    std::string outcome;
};

struct NameDecision {
    NbsId nbs;
    std::string final_name;
    NameProvenance path = NameProvenance::Round1;
    std::vector<AuditStep> audit;
};

// Either a chosen option or an escalation carrying the candidates forward.
struct StageOutcome {
    std::optional<std::string> selected;
    std::vector<std::string> escalated;
    AuditStep audit;

    bool escalates() const { return !selected.has_value(); }
};

StageOutcome round1_select(const VoteTally& tally);

std::pair<long long, long long> reconstruct_counts(double percentage_a, double percentage_b, int total_valid);

StageOutcome round2_test(const VoteTally& tally, double alpha = 0.05);

struct ArbitrationOutcome {
    std::string final_name;
    NameProvenance path = NameProvenance::CitationArbitration;
    AuditStep audit;
};

ArbitrationOutcome citation_arbitrate(const std::vector<CitationCount>& candidates);

struct ConsensusInputs {
    std::map<NbsId, VoteTally, NaturalLess> round1;
    std::map<NbsId, VoteTally, NaturalLess> round2;
    std::map<NbsId, std::vector<CitationCount>, NaturalLess> citations;
};

NameDecision resolve_name(std::string_view nbs, const ConsensusInputs& inputs, double alpha = 0.05);
std::vector<NameDecision> resolve_all(const ConsensusInputs& inputs, double alpha = 0.05);

// Reads round1.tsv, round2.tsv and citations.tsv. Round-one rows flagged as
// aggregate buckets ("Others") are left out of the tallies.
ConsensusInputs load_consensus(const std::filesystem::path& dir);

std::string to_string(SurveyRound r);
std::string to_string(CandidateSource s);

// Plain-text record: header line, then one indented line per audit step.
void write_decision(std::ostream& out, const NameDecision& decision);

}  // namespace nbs
