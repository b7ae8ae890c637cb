#pragma once

#include <complex>
#include <string>
#include <vector>

namespace bt::io {

// 17 significant digits, lowercase scientific exponent.  Round-trips IEEE
// doubles exactly and keeps output diff-stable.
std::string fmt17(double v);

std::string fmt17(std::complex<double> v);  // "re,im" pair

// Minimal deterministic CSV assembly: caller provides the header once, then
// appends rows of preformatted cells.
class CsvBuilder {
  public:
    explicit CsvBuilder(const std::string& header) { text_ = header + "\n"; }
    void row(const std::vector<std::string>& cells);
    const std::string& text() const { return text_; }

  private:
    std::string text_;
};

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// JSON string escaping for hand-assembled JSON lines.
std::string json_escape(const std::string& s);

}  // namespace bt::io
