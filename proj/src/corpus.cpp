#include "corpus.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "util.hpp"

namespace datacure {

namespace {

const char* kKnownFields[] = {"id", "query", "label", "ground_truth", "tags"};

bool is_known_field(const std::string& key) {
    for (const char* f : kKnownFields)
        if (key == f) return true;
    return false;
}

std::string padded_id(std::size_t index) {
    std::string digits = std::to_string(index);
    if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
    return "s" + digits;
}

std::string strip_surrounding_punct(const std::string& s) {
    auto is_punct = [](char c) {
        return std::strchr("()[]{}<>.,:;!?\"'`*_", c) != nullptr;
    };
    std::size_t b = 0, e = s.size();
    while (b < e && is_punct(s[b])) ++b;
    while (e > b && is_punct(s[e - 1])) --e;
    return s.substr(b, e - b);
}

}  // namespace

TaskKind task_kind_from_string(const std::string& s) {
    if (s == "multiple-choice") return TaskKind::MultipleChoice;
    if (s == "short-answer") return TaskKind::ShortAnswer;
    if (s == "free-text") return TaskKind::FreeText;
    throw ConfigError("unknown task_kind '" + s +
                      "' (expected multiple-choice, short-answer or free-text)");
}

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::MultipleChoice: return "multiple-choice";
        case TaskKind::ShortAnswer: return "short-answer";
        case TaskKind::FreeText: return "free-text";
    }
    return "free-text";
}

const Sample* Dataset::find(const std::string& id) const {
    for (const auto& s : samples)
        if (s.id == id) return &s;
    return nullptr;
}

Dataset parse_dataset(std::istream& in, const std::string& origin) {
    Dataset out;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    std::size_t auto_index = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_view(line).empty()) continue;
        nlohmann::ordered_json rec;
        try {
            rec = nlohmann::ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(origin + ":" + std::to_string(line_no) +
                             ": malformed record: " + e.what());
        }
        if (!rec.is_object())
            throw ParseError(origin + ":" + std::to_string(line_no) +
                             ": record is not an object");

        Sample s;
        auto require_string = [&](const char* field) -> std::string {
            if (!rec.contains(field))
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": record missing \"" + field + "\" field");
            if (!rec[field].is_string())
                throw ParseError(origin + ":" + std::to_string(line_no) + ": field \"" +
                                 field + "\" is not a string");
            return rec[field].get<std::string>();
        };
        s.query = require_string("query");
        s.label = require_string("label");
        if (trim_view(s.query).empty())
            throw ParseError(origin + ":" + std::to_string(line_no) + ": empty query");
        if (trim_view(s.label).empty())
            throw ParseError(origin + ":" + std::to_string(line_no) + ": empty label");

        if (rec.contains("id")) {
            if (!rec["id"].is_string())
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": field \"id\" is not a string");
            s.id = rec["id"].get<std::string>();
        } else {
            s.id = padded_id(auto_index);
        }
        ++auto_index;

        if (rec.contains("ground_truth")) {
            if (!rec["ground_truth"].is_string())
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": field \"ground_truth\" is not a string");
            std::string gt = rec["ground_truth"].get<std::string>();
            if (trim_view(gt).empty())
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": empty ground_truth");
            s.ground_truth = std::move(gt);
        }
        if (rec.contains("tags")) {
            if (!rec["tags"].is_array())
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": field \"tags\" is not an array");
            for (const auto& t : rec["tags"]) {
                if (!t.is_string())
                    throw ParseError(origin + ":" + std::to_string(line_no) +
                                     ": non-string tag");
                s.tags.insert(t.get<std::string>());
            }
        } else {
            s.tags.insert(kTagOriginal);
        }
        for (auto it = rec.begin(); it != rec.end(); ++it) {
            if (!is_known_field(it.key())) s.extra[it.key()] = it.value();
        }

        if (!seen_ids.insert(s.id).second)
            throw ParseError(origin + ":" + std::to_string(line_no) + ": duplicate id '" +
                             s.id + "'");
        out.samples.push_back(std::move(s));
    }
    return out;
}

Dataset load_dataset(const std::string& path, DatasetFormat format) {
    (void)format;  // only JSONL for now
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);
    return parse_dataset(in, path);
}

nlohmann::ordered_json sample_to_json(const Sample& s) {
    nlohmann::ordered_json rec;
    rec["id"] = s.id;
    rec["query"] = s.query;
    rec["label"] = s.label;
    if (s.ground_truth) rec["ground_truth"] = *s.ground_truth;
    rec["tags"] = std::vector<std::string>(s.tags.begin(), s.tags.end());
    for (auto it = s.extra.begin(); it != s.extra.end(); ++it) rec[it.key()] = it.value();
    return rec;
}

void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write dataset file: " + path);
    for (const auto& s : d.samples) out << sample_to_json(s).dump() << "\n";
    out.flush();
    if (!out) throw IoError("I/O failure while writing: " + path);
}

std::string normalize_answer(const std::string& raw, TaskKind kind) {
    std::string s = collapse_whitespace(to_lower(trim_view(raw)));
    switch (kind) {
        case TaskKind::MultipleChoice: {
            // First standalone option identifier (single letter or digit,
            // optionally wrapped in punctuation) wins.
            for (const auto& tok : split(s, ' ')) {
                std::string u = strip_surrounding_punct(tok);
                if (u.size() == 1 && std::isalnum(static_cast<unsigned char>(u[0])))
                    return u;
            }
            return s;
        }
        case TaskKind::ShortAnswer:
            return strip_surrounding_punct(s);
        case TaskKind::FreeText:
            return s;
    }
    return s;
}

}  // namespace datacure
