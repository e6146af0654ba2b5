#include "dialnorm/csv.hpp"

#include "dialnorm/error.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace dialnorm::csv {

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    std::size_t i = 0;
    std::size_t line = 1;
    // A UTF-8 BOM is tolerated on the first record.
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

    while (i < text.size()) {
        Row row;
        row.line = line;
        std::string field;
        bool in_quotes = false;
        bool field_was_quoted = false;
        bool record_done = false;
        while (i < text.size() && !record_done) {
            const char c = text[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
                continue;
            }
            switch (c) {
                case '"':
                    if (field.empty() && !field_was_quoted) {
                        in_quotes = true;
                        field_was_quoted = true;
                    } else {
                        throw RowError(line, "stray quote inside unquoted field");
                    }
                    ++i;
                    break;
                case ',':
                    row.fields.push_back(std::move(field));
                    field.clear();
                    field_was_quoted = false;
                    ++i;
                    break;
                case '\r':
                    ++i;
                    if (i < text.size() && text[i] == '\n') ++i;
                    ++line;
                    record_done = true;
                    break;
                case '\n':
                    ++i;
                    ++line;
                    record_done = true;
                    break;
                default:
                    field.push_back(c);
                    ++i;
            }
        }
        if (in_quotes) throw RowError(row.line, "unterminated quoted field");
        row.fields.push_back(std::move(field));
        const bool blank = row.fields.size() == 1 && row.fields[0].empty() && !field_was_quoted;
        if (!blank) rows.push_back(std::move(row));
    }
    return rows;
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += quote(fields[i]);
    }
    out.push_back('\n');
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error("read failed: " + path.string());
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    static std::atomic<unsigned> counter{0};
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ostringstream suffix;
    suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
           << counter.fetch_add(1);
    const std::filesystem::path tmp = path.string() + suffix.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace dialnorm::csv
