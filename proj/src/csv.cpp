#include "mtginf/detail/csv.hpp"

#include "mtginf/errors.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>

namespace mtginf::detail {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<CsvRow> parse_csv(std::istream& in)
{
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    bool row_has_content = false;
    char c;

    auto end_field = [&] {
        row.push_back(was_quoted ? field : trim(field));
        field.clear();
        was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        if (row_has_content) rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };

    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                }
                else {
                    quoted = false;
                }
            }
            else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            was_quoted = true;
            row_has_content = true;
        }
        else if (c == ',') {
            end_field();
            row_has_content = true;
        }
        else if (c == '\n') {
            end_row();
        }
        else {
            if (c != '\r' && c != ' ' && c != '\t') row_has_content = true;
            field.push_back(c);
        }
    }
    if (row_has_content || !field.empty()) end_row();
    return rows;
}

std::vector<CsvRow> read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_csv(in);
}

std::optional<double> parse_double(const std::string& field)
{
    if (field.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || errno == ERANGE) return std::nullopt;
    return v;
}

}  // namespace mtginf::detail
