#pragma once

// Minimal RFC 4180 CSV reading/writing: quoted fields, embedded commas,
// doubled quotes, and embedded newlines inside quotes.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sizesweep {

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(fields[i]);
    }
    return out;
}

// Reads one record (possibly spanning lines due to quoted newlines).
// Returns false on end of input with no data consumed.
inline bool csv_read_record(std::istream& in, std::vector<std::string>& fields, size_t& line_no) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field += char(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            ++line_no;
            break;
        } else if (c == '\r') {
            if (in.peek() == '\n') {
                in.get();
                ++line_no;
            } else {
                ++line_no;
            }
            break;
        } else {
            field += char(c);
        }
    }
    if (!any) return false;
    if (in_quotes) throw std::runtime_error("unterminated quoted field at line " + std::to_string(line_no));
    fields.push_back(std::move(field));
    return true;
}

}  // namespace sizesweep
