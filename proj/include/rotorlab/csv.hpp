#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace rotorlab {

// RFC-4180-style CSV writer with deterministic number formatting so that
// identical runs produce byte-identical files.
class CsvWriter {
public:
    // throws InputError when the file cannot be opened
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& fields);

    static std::string format(double v);

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::string path_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// throws InputError on missing file; no schema interpretation here
CsvTable read_csv(const std::string& path);

} // namespace rotorlab
