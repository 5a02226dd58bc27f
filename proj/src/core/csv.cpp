#include "kumpul/core/csv.hpp"

#include "kumpul/core/error.hpp"

namespace kumpul::csv {

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i != 0) {
            out << ',';
        }
        out << escape(fields[i]);
    }
    out << "\r\n";
}

std::optional<std::vector<std::string>> read_row(std::istream& in) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c = 0;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            fields.push_back(std::move(field));
            return fields;
        } else if (c == '\r') {
            if (in.peek() == '\n') {
                in.get();
            }
            fields.push_back(std::move(field));
            return fields;
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) {
        throw Error(ErrorCode::validation, "csv: unterminated quoted field");
    }
    if (!any) {
        return std::nullopt;
    }
    fields.push_back(std::move(field));
    return fields;
}

} // namespace kumpul::csv
