#include "psvm/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace psvm {

namespace {

bool needs_quoting(const std::string& cell) {
    return cell.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote(const std::string& cell) {
    std::string out = "\"";
    for (char ch : cell) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

RawTable parse_csv(const std::string& text) {
    RawTable table;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (header) {
            table.names = cells;
            table.columns.resize(cells.size());
            header = false;
            continue;
        }
        if (cells.size() != table.names.size())
            throw DataError("csv row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(table.names.size()));
        for (std::size_t c = 0; c < cells.size(); ++c)
            table.columns[c].push_back(std::move(cells[c]));
        ++row;
    }
    if (header)
        throw DataError("csv has no header row");
    return table;
}

RawTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

void write_csv(const std::string& path, const RawTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write '" + path + "'");
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        if (c) out << ',';
        out << (needs_quoting(table.names[c]) ? quote(table.names[c]) : table.names[c]);
    }
    out << '\n';
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        for (std::size_t c = 0; c < table.n_cols(); ++c) {
            if (c) out << ',';
            const std::string& cell = table.columns[c][i];
            out << (needs_quoting(cell) ? quote(cell) : cell);
        }
        out << '\n';
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace psvm
