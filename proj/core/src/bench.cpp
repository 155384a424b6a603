#include "orderline/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "orderline/followup.hpp"
#include "text_util.hpp"

namespace orderline {

using nlohmann::json;
using nlohmann::ordered_json;

// --- dataset ----------------------------------------------------------------

namespace {

ordered_json fields_json(const FieldSet& set) {
    ordered_json a = ordered_json::array();
    for (auto f : set.to_vector()) a.push_back(to_string(f));
    return a;
}

FieldSet fields_from_json(const json& j, const char* key) {
    if (!j.is_array()) throw std::invalid_argument(std::string(key) + " must be an array");
    FieldSet set;
    for (const auto& v : j) {
        if (!v.is_string()) throw std::invalid_argument(std::string(key) + " entries must be strings");
        auto f = parse_field_name(v.get<std::string>());
        if (!f) throw std::invalid_argument("unknown field '" + v.get<std::string>() + "' in " + key);
        if (set.contains(*f)) throw std::invalid_argument("duplicate field '" + v.get<std::string>() + "' in " + key);
        set.insert(*f);
    }
    return set;
}

// Shape errors become DatasetParseError; semantic ones DatasetInvariantViolation.
DatasetRecord parse_line(const std::string& line, int line_no, std::set<std::string>& seen) {
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw DatasetParseError(line_no, "not valid JSON");
    if (!j.is_object()) throw DatasetParseError(line_no, "record must be a JSON object");
    DatasetRecord r;
    try {
        r = record_from_json(j);
    } catch (const std::exception& e) {
        throw DatasetParseError(line_no, e.what());
    }
    auto violation = [&](const std::string& detail) {
        return DatasetInvariantViolation(r.id, line_no, detail);
    };
    if (!seen.insert(r.id).second) throw violation("duplicate id");
    if (r.category == Intent::Other && r.gold) throw violation("records of category other carry no gold");
    if (r.category != Intent::Other && !r.gold) throw violation("gold is required for this category");
    const FieldSet expected = r.gold ? missing_fields(*r.gold) : FieldSet{};
    if (r.gold_followups != expected) {
        throw violation("gold_followups " + r.gold_followups.to_string() +
                        " differ from missing_fields(gold) " + expected.to_string());
    }
    return r;
}

}  // namespace

ordered_json to_json(const DatasetRecord& r) {
    ordered_json j = ordered_json::object();
    j["id"] = r.id;
    j["input_text"] = r.input_text;
    j["category"] = to_string(r.category);
    if (r.gold) j["gold"] = to_wire(*r.gold);
    j["gold_followups"] = fields_json(r.gold_followups);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

DatasetRecord record_from_json(const json& j) {
    static const std::set<std::string> kKeys = {"id", "input_text", "category", "gold",
                                                "gold_followups", "note"};
    for (const auto& [key, _] : j.items()) {
        if (!kKeys.count(key)) throw std::invalid_argument("unexpected key '" + key + "'");
    }
    DatasetRecord r;
    r.id = j.at("id").get<std::string>();
    if (r.id.empty()) throw std::invalid_argument("id must not be empty");
    r.input_text = j.at("input_text").get<std::string>();
    const auto cat = j.at("category").get<std::string>();
    auto intent = parse_intent(cat);
    if (!intent) throw std::invalid_argument("unknown category '" + cat + "'");
    r.category = *intent;
    if (j.contains("gold") && !j["gold"].is_null()) {
        r.gold = parse_draft(j["gold"], ExtractionPolicy::Strict).draft;
    }
    r.gold_followups = fields_from_json(j.at("gold_followups"), "gold_followups");
    if (j.contains("note")) r.note = j["note"].get<std::string>();
    return r;
}

std::vector<DatasetRecord> read_dataset(std::istream& in) {
    std::vector<DatasetRecord> out;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_line(line, line_no, seen));
    }
    return out;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset: " + path.string());
    return read_dataset(in);
}

std::vector<DatasetIssue> validate_dataset(std::istream& in) {
    std::vector<DatasetIssue> issues;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            parse_line(line, line_no, seen);
        } catch (const Error& e) {
            issues.push_back({line_no, e.what()});
        }
    }
    return issues;
}

CategoryCounts count_categories(const std::vector<DatasetRecord>& records) {
    CategoryCounts c;
    for (const auto& r : records) {
        switch (r.category) {
            case Intent::TradeInstruction: ++c.trade_instruction; break;
            case Intent::TradeRelated: ++c.trade_related; break;
            case Intent::Other: ++c.other; break;
        }
    }
    return c;
}

// --- evaluation -------------------------------------------------------------

namespace {

FieldSet classify_all(const std::vector<std::string>& questions) {
    FieldSet asked;
    for (const auto& q : questions) {
        if (auto f = classify_followup_question(q)) asked.insert(*f);
    }
    return asked;
}

}  // namespace

EvalOutcome score_reply(const DatasetRecord& record, const std::string& reply_text,
                        ExtractionPolicy policy) {
    EvalOutcome out;
    out.id = record.id;
    out.raw_reply = reply_text;
    try {
        ParsedReply parsed = parse_reply(reply_text, policy);
        out.generated = true;
        out.predicted = parsed.draft;
        out.diff = compare_drafts(record.gold.value_or(OrderDraft{}), parsed.draft);
        out.warnings = std::move(parsed.warnings);
        if (parsed.structured) {
            for (auto f : parsed.follow_up) out.asked.insert(f);
        } else {
            out.asked = classify_all(parsed.questions);
        }
    } catch (const Error& e) {
        out.warnings.emplace_back(e.what());
        out.asked = classify_all(find_questions(reply_text));
    }
    return out;
}

EvalOutcome evaluate_record(const DatasetRecord& record, ChatProvider& provider,
                            const std::string& system_prompt, ExtractionPolicy policy) {
    const std::vector<ChatTurn> transcript = {{Role::System, system_prompt},
                                              {Role::User, record.input_text}};
    std::string reply;
    try {
        reply = complete(transcript, provider);
    } catch (const std::exception& e) {
        EvalOutcome out;
        out.id = record.id;
        out.error = e.what();
        return out;
    }
    return score_reply(record, reply, policy);
}

// --- metrics ----------------------------------------------------------------

double Rate::percent() const {
    if (!defined()) return std::nan("");
    return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::string Rate::to_string() const {
    if (!defined()) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", percent());
    return buf;
}

MetricsReport report_from_counts(const MetricsCounts& c, std::string model_name) {
    MetricsReport r;
    r.model_name = std::move(model_name);
    r.counts = c;
    r.generation_rate = {c.json_outputs, c.total_inputs};
    r.missing_rate = {c.missing_json_outputs, c.json_outputs};
    r.error_rate = {c.error_json_outputs, c.json_outputs};
    r.accuracy = {c.correct_json_outputs, c.total_inputs};
    r.followup_rate = {c.followups, c.total_required_followups};
    r.missed_followup_rate = {c.missing_followups, c.total_required_followups};
    r.extra_followup_rate = {c.extra_followups, c.total_required_followups};
    return r;
}

MetricsReport compute_metrics(const std::vector<EvalOutcome>& outcomes,
                              const std::vector<DatasetRecord>& records, std::string model_name) {
    std::map<std::string, const DatasetRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;
    if (by_id.size() != records.size()) throw MisalignedOutcomes("duplicate record ids");
    if (outcomes.size() != records.size()) {
        throw MisalignedOutcomes(std::to_string(outcomes.size()) + " outcomes for " +
                                 std::to_string(records.size()) + " records");
    }

    std::set<std::string> used;
    MetricsCounts c;
    for (const auto& o : outcomes) {
        auto it = by_id.find(o.id);
        if (it == by_id.end()) throw MisalignedOutcomes("outcome for unknown record " + o.id);
        if (!used.insert(o.id).second) throw MisalignedOutcomes("two outcomes for record " + o.id);
        if (o.generated != o.diff.has_value()) {
            throw MisalignedOutcomes("outcome " + o.id + " has inconsistent diff");
        }
        const DatasetRecord& rec = *it->second;

        ++c.total_inputs;
        if (o.generated) {
            ++c.json_outputs;
            if (!o.diff->missing.empty()) ++c.missing_json_outputs;
            if (!o.diff->wrong.empty()) ++c.error_json_outputs;
            if (o.diff->empty()) ++c.correct_json_outputs;
        }
        const bool extra = !o.asked.is_subset_of(rec.gold_followups);
        if (!rec.gold_followups.empty()) {
            ++c.total_required_followups;
            if (!o.asked.empty()) ++c.followups;
            if (!rec.gold_followups.is_subset_of(o.asked)) ++c.missing_followups;
            if (extra) ++c.extra_followups;
        } else if (extra) {
            ++c.extra_followups_on_complete;
        }
    }
    return report_from_counts(c, std::move(model_name));
}

EvalRun run_eval(const std::vector<DatasetRecord>& records, ChatProvider& provider,
                 const std::string& system_prompt, const EvalOptions& options) {
    if (options.parallelism < 1) throw std::invalid_argument("parallelism must be at least 1");

    std::vector<EvalOutcome> outcomes(records.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < records.size(); i = next++) {
            outcomes[i] = evaluate_record(records[i], provider, system_prompt, options.policy);
        }
    };
    const std::size_t n_threads = std::min(options.parallelism, std::max<std::size_t>(records.size(), 1));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    std::sort(outcomes.begin(), outcomes.end(),
              [](const EvalOutcome& a, const EvalOutcome& b) { return a.id < b.id; });
    EvalRun run;
    run.errored = static_cast<std::size_t>(std::count_if(
        outcomes.begin(), outcomes.end(), [](const EvalOutcome& o) { return !o.error.empty(); }));
    run.report = compute_metrics(outcomes, records, provider.name());
    run.outcomes = std::move(outcomes);
    return run;
}

// --- reports ----------------------------------------------------------------

std::optional<ReportFormat> parse_report_format(std::string_view raw) {
    const std::string name = text::to_lower(text::trim(raw));
    if (name == "markdown" || name == "md") return ReportFormat::Markdown;
    if (name == "csv") return ReportFormat::Csv;
    return std::nullopt;
}

namespace {

struct Column {
    const char* title;
    const char* key;
    Rate MetricsReport::*rate;
};

constexpr Column kColumns[] = {
    {"Generation Rate", "generation_rate", &MetricsReport::generation_rate},
    {"Missing Rate", "missing_rate", &MetricsReport::missing_rate},
    {"Error Rate", "error_rate", &MetricsReport::error_rate},
    {"Accuracy", "accuracy", &MetricsReport::accuracy},
    {"Follow-up Rate", "followup_rate", &MetricsReport::followup_rate},
    {"Missed Follow-up Rate", "missed_followup_rate", &MetricsReport::missed_followup_rate},
    {"Extra Follow-up Rate", "extra_followup_rate", &MetricsReport::extra_followup_rate},
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else if (c != '\r') {
            out.back() += c;
        }
    }
    return out;
}

std::string percent_cell(const Rate& r) { return r.defined() ? r.to_string() + "%" : "n/a"; }

}  // namespace

std::string emit_report(const std::vector<MetricsReport>& reports, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::Markdown) {
        out << "| Model Name |";
        for (const auto& c : kColumns) out << ' ' << c.title << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < std::size(kColumns); ++i) out << "---:|";
        out << '\n';
        for (const auto& r : reports) {
            out << "| " << r.model_name << " |";
            for (const auto& c : kColumns) out << ' ' << percent_cell(r.*(c.rate)) << " |";
            out << '\n';
        }
        return out.str();
    }
    out << "model";
    for (const auto& c : kColumns) out << ',' << c.key << ',' << c.key << "_num," << c.key << "_den";
    out << '\n';
    for (const auto& r : reports) {
        out << csv_field(r.model_name);
        for (const auto& c : kColumns) {
            const Rate& rate = r.*(c.rate);
            out << ',' << rate.to_string() << ',' << rate.numerator << ',' << rate.denominator;
        }
        out << '\n';
    }
    return out.str();
}

std::vector<MetricsReport> parse_report_csv(std::istream& in) {
    std::vector<MetricsReport> reports;
    std::string line;
    if (!std::getline(in, line)) return reports;
    const auto header = split_csv_line(line);
    const std::size_t width = 1 + 3 * std::size(kColumns);
    if (header.size() != width || header[0] != "model") throw Error("not a report CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != width) throw Error("report CSV row has " + std::to_string(cells.size()) + " cells");
        MetricsReport r;
        r.model_name = cells[0];
        for (std::size_t i = 0; i < std::size(kColumns); ++i) {
            Rate& rate = r.*(kColumns[i].rate);
            rate.numerator = std::stoull(cells[2 + 3 * i]);
            rate.denominator = std::stoull(cells[3 + 3 * i]);
        }
        auto& c = r.counts;
        c.total_inputs = r.generation_rate.denominator;
        c.json_outputs = r.generation_rate.numerator;
        c.missing_json_outputs = r.missing_rate.numerator;
        c.error_json_outputs = r.error_rate.numerator;
        c.correct_json_outputs = r.accuracy.numerator;
        c.total_required_followups = r.followup_rate.denominator;
        c.followups = r.followup_rate.numerator;
        c.missing_followups = r.missed_followup_rate.numerator;
        c.extra_followups = r.extra_followup_rate.numerator;
        reports.push_back(std::move(r));
    }
    return reports;
}

std::string emit_detail_csv(const std::vector<EvalOutcome>& outcomes,
                            const std::vector<DatasetRecord>& records) {
    std::map<std::string, const DatasetRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;
    auto fields = [](const FieldSet& s) {
        std::string out;
        for (auto f : s.to_vector()) {
            if (!out.empty()) out += ' ';
            out += to_string(f);
        }
        return out;
    };
    std::ostringstream out;
    out << "id,category,generated,correct,missing_fields,wrong_fields,asked,gold_followups,error\n";
    for (const auto& o : outcomes) {
        auto it = by_id.find(o.id);
        const DatasetRecord* rec = it == by_id.end() ? nullptr : it->second;
        out << csv_field(o.id) << ',' << (rec ? to_string(rec->category) : "") << ','
            << (o.generated ? "true" : "false") << ','
            << (o.generated && o.diff->empty() ? "true" : "false") << ','
            << (o.diff ? fields(o.diff->missing) : "") << ',' << (o.diff ? fields(o.diff->wrong) : "")
            << ',' << fields(o.asked) << ',' << (rec ? fields(rec->gold_followups) : "") << ','
            << csv_field(o.error) << '\n';
    }
    return out.str();
}

}  // namespace orderline
