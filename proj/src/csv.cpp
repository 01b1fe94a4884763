#include "loskit/csv.hpp"

#include <charconv>

#include "loskit/error.hpp"

namespace loskit::csv {

Reader::Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_)
        throw Error::runtime("cannot open CSV file: " + path);
    if (!read_record(header_))
        throw Error::runtime("CSV file has no header row: " + path);
}

bool Reader::next(std::vector<std::string>& fields) {
    return read_record(fields);
}

bool Reader::read_record(std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in_.get()) != std::ifstream::traits_type::eof()) {
        any = true;
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    field.push_back('"');
                    in_.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                in_quotes = true;
                break;
            case ',':
                fields.push_back(std::move(field));
                field.clear();
                break;
            case '\r':
                break;
            case '\n':
                fields.push_back(std::move(field));
                ++line_;
                return true;
            default:
                field.push_back(ch);
        }
    }
    if (in_quotes)
        throw Error::runtime("unterminated quoted field in " + path_);
    if (!any)
        return false;
    fields.push_back(std::move(field));
    ++line_;
    return true;
}

Writer::Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_)
        throw Error::runtime("cannot open file for writing: " + path);
}

void Writer::write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << quote_if_needed(fields[i]);
    }
    out_ << '\n';
    if (!out_)
        throw Error::runtime("write failed: " + path_);
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string quote_if_needed(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

}  // namespace loskit::csv
