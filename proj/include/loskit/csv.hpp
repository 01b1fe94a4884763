#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace loskit::csv {

// Streaming reader for UTF-8 CSV with a header row, comma delimiter and
// optional RFC 4180 quoting (embedded commas, quotes and newlines).
class Reader {
public:
    explicit Reader(const std::string& path);

    const std::vector<std::string>& header() const noexcept { return header_; }

    // Reads the next record into `fields`. Returns false at end of input.
    bool next(std::vector<std::string>& fields);

    // 1-based line number of the last record read (for error messages).
    std::size_t line() const noexcept { return line_; }

private:
    bool read_record(std::vector<std::string>& fields);

    std::ifstream in_;
    std::string path_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
};

class Writer {
public:
    explicit Writer(const std::string& path);

    void write_row(const std::vector<std::string>& fields);

private:
    std::ofstream out_;
    std::string path_;
};

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

std::string quote_if_needed(const std::string& field);

}  // namespace loskit::csv
