#pragma once

#include <cstdio>
#include <initializer_list>
#include <string>
#include <vector>

#include "osgood/error.hpp"

namespace osgood {

/// Minimal CSV emitter; doubles are printed with %.17g so output is
/// round-trippable and byte-stable for identical inputs.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : fp_(std::fopen(path.c_str(), "w")) {
    if (!fp_) throw Error(ErrorCode::IoError, "cannot write " + path);
  }
  ~CsvWriter() {
    if (fp_) std::fclose(fp_);
  }
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void comment(const std::string& text) { std::fprintf(fp_, "# %s\n", text.c_str()); }

  void header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      std::fprintf(fp_, "%s%s", first ? "" : ",", c);
      first = false;
    }
    std::fputc('\n', fp_);
  }

  void row(std::initializer_list<double> vals) { row(std::vector<double>(vals)); }

  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) std::fprintf(fp_, "%s%.17g", i ? "," : "", vals[i]);
    std::fputc('\n', fp_);
  }

  /// A row whose leading cells are text.
  void row(const std::vector<std::string>& keys, const std::vector<double>& vals) {
    for (std::size_t i = 0; i < keys.size(); ++i) std::fprintf(fp_, "%s%s", i ? "," : "", keys[i].c_str());
    for (double v : vals) std::fprintf(fp_, ",%.17g", v);
    std::fputc('\n', fp_);
  }

 private:
  std::FILE* fp_;
};

}  // namespace osgood
