#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orderline/order.hpp"

namespace orderline {

/// Keyword lexicon mapping follow-up questions to the field they ask about.
///
/// File format: UTF-8, one `field<TAB>keyword` pair per line, `#` comments.
/// The keyword whose first occurrence in the lowercased question is earliest
/// wins; ties go to the longer keyword.
class FollowupLexicon {
public:
    struct Entry {
        FieldName field;
        std::string keyword;  // lowercased
    };

    static FollowupLexicon builtin();
    static FollowupLexicon load(const std::filesystem::path& path);

    void add(FieldName field, std::string_view keyword);
    std::optional<FieldName> classify(std::string_view question) const;
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

/// nullopt means the question is unclassifiable (asks about no order field).
std::optional<FieldName> classify_followup_question(std::string_view question,
                                                    const FollowupLexicon& lexicon);
std::optional<FieldName> classify_followup_question(std::string_view question);

// Question sentences in free text: spans ending in '?' or the full-width '？'.
std::vector<std::string> find_questions(std::string_view text);

}  // namespace orderline
