#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "orderline/dialogue.hpp"
#include "orderline/extract.hpp"
#include "orderline/gateway.hpp"
#include "orderline/order.hpp"
#include "orderline/symbols.hpp"

namespace orderline {

// --- dataset ----------------------------------------------------------------

/// One labelled utterance. `gold` is absent exactly for Intent::Other, and
/// gold_followups always equals missing_fields(gold) (empty without gold).
struct DatasetRecord {
    std::string id;
    std::string input_text;
    Intent category = Intent::TradeInstruction;
    std::optional<OrderDraft> gold;
    FieldSet gold_followups;
    std::string note;
};

class DatasetParseError : public Error {
public:
    DatasetParseError(int line, const std::string& detail)
        : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class DatasetInvariantViolation : public Error {
public:
    DatasetInvariantViolation(const std::string& id, int line, const std::string& detail)
        : Error("line " + std::to_string(line) + " (record " + id + "): " + detail), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

nlohmann::ordered_json to_json(const DatasetRecord& record);
DatasetRecord record_from_json(const nlohmann::json& j);  // shape only, no invariant checks

// Throws DatasetParseError / DatasetInvariantViolation on the first problem.
std::vector<DatasetRecord> read_dataset(std::istream& in);
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path);

struct DatasetIssue {
    int line;
    std::string message;
};
// Every problem in the stream, for `dataset validate`.
std::vector<DatasetIssue> validate_dataset(std::istream& in);

struct CategoryCounts {
    std::size_t trade_instruction = 0;
    std::size_t trade_related = 0;
    std::size_t other = 0;
    bool operator==(const CategoryCounts&) const = default;
};
CategoryCounts count_categories(const std::vector<DatasetRecord>& records);

// --- evaluation -------------------------------------------------------------

struct EvalOutcome {
    std::string id;
    bool generated = false;
    std::optional<OrderDraft> predicted;
    std::optional<FieldDiff> diff;  // set iff generated
    FieldSet asked;
    std::string raw_reply;
    std::string error;  // provider failure, empty otherwise
    std::vector<std::string> warnings;
};

struct EvalOptions {
    ExtractionPolicy policy = ExtractionPolicy::Strict;
    std::size_t parallelism = 1;
};

/// Single-shot: system prompt + utterance, one provider call, parse, diff.
/// Provider errors become generated=false with `error` set.
EvalOutcome evaluate_record(const DatasetRecord& record, ChatProvider& provider,
                            const std::string& system_prompt,
                            ExtractionPolicy policy = ExtractionPolicy::Strict);

// Scores an already captured reply (no provider call).
EvalOutcome score_reply(const DatasetRecord& record, const std::string& reply_text,
                        ExtractionPolicy policy = ExtractionPolicy::Strict);

// --- metrics ----------------------------------------------------------------

struct MetricsCounts {
    std::uint64_t total_inputs = 0;
    std::uint64_t json_outputs = 0;
    std::uint64_t missing_json_outputs = 0;
    std::uint64_t error_json_outputs = 0;
    std::uint64_t correct_json_outputs = 0;
    std::uint64_t total_required_followups = 0;
    std::uint64_t followups = 0;
    std::uint64_t missing_followups = 0;
    std::uint64_t extra_followups = 0;
    // Not a reported rate: questions asked on records that needed none.
    std::uint64_t extra_followups_on_complete = 0;

    bool operator==(const MetricsCounts&) const = default;
};

struct Rate {
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 0;

    bool defined() const { return denominator > 0; }
    double percent() const;           // NaN when undefined
    std::string to_string() const;    // "87.50" or "n/a"
    bool operator==(const Rate&) const = default;
};

struct MetricsReport {
    std::string model_name;
    MetricsCounts counts;
    Rate generation_rate;
    Rate missing_rate;
    Rate error_rate;
    Rate accuracy;
    Rate followup_rate;
    Rate missed_followup_rate;
    Rate extra_followup_rate;

    bool operator==(const MetricsReport&) const = default;
};

class MisalignedOutcomes : public Error {
public:
    using Error::Error;
};

MetricsReport report_from_counts(const MetricsCounts& counts, std::string model_name = {});

/// Outcomes are matched to records by id; order does not matter.
MetricsReport compute_metrics(const std::vector<EvalOutcome>& outcomes,
                              const std::vector<DatasetRecord>& records,
                              std::string model_name = {});

struct EvalRun {
    std::vector<EvalOutcome> outcomes;  // sorted by id
    MetricsReport report;
    std::size_t errored = 0;
};

/// Evaluates every record with at most options.parallelism concurrent
/// provider calls. The provider must tolerate concurrent reply() calls.
EvalRun run_eval(const std::vector<DatasetRecord>& records, ChatProvider& provider,
                 const std::string& system_prompt, const EvalOptions& options = {});

// --- reports ----------------------------------------------------------------

enum class ReportFormat { Markdown, Csv };
std::optional<ReportFormat> parse_report_format(std::string_view name);

std::string emit_report(const std::vector<MetricsReport>& reports, ReportFormat format);
std::string emit_detail_csv(const std::vector<EvalOutcome>& outcomes,
                            const std::vector<DatasetRecord>& records);

// Reads back the summary CSV written by emit_report(Csv).
std::vector<MetricsReport> parse_report_csv(std::istream& in);

}  // namespace orderline
