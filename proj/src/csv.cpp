#include "mqreg/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mqreg {

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return j;
    }
    throw CsvError("column not found: " + name);
}

namespace {

// One record, honoring quoted fields that may span lines.
bool read_record(std::istream& is, std::vector<std::string>& fields, int& line_no) {
    fields.clear();
    int ch = is.get();
    if (ch == EOF) return false;
    std::string field;
    bool in_quotes = false;
    for (;;) {
        if (ch == EOF) {
            if (in_quotes) throw CsvError("unterminated quote at line " + std::to_string(line_no));
            break;
        }
        char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (is.peek() == '"') {
                    field.push_back('"');
                    is.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            ++line_no;
            break;
        } else if (c != '\r') {
            field.push_back(c);
        }
        ch = is.get();
    }
    fields.push_back(std::move(field));
    return true;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::vector<std::string> fields;
    int line_no = 1;
    if (!read_record(is, fields, line_no)) throw CsvError("empty input, header required");
    table.header = fields;
    while (read_record(is, fields, line_no)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != table.header.size()) {
            throw CsvError("row " + std::to_string(table.rows.size() + 1) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(table.header.size()));
        }
        table.rows.push_back(fields);
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CsvError("cannot open file: " + path);
    return read_csv(is);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const CsvTable& table, std::ostream& os) {
    std::string out;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j) out.push_back(',');
        out += csv_quote(table.header[j]);
    }
    out.push_back('\n');
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out.push_back(',');
            out += csv_quote(row[j]);
        }
        out.push_back('\n');
    }
    os << out;
}

}  // namespace mqreg
