#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mqreg {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Header plus string cells; RFC-style quoting on both ends.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Throws CsvError naming the column when it is missing.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

std::string csv_quote(const std::string& field);
std::string format_double(double v);  // 17 significant digits

void write_csv(const CsvTable& table, std::ostream& os);

}  // namespace mqreg
