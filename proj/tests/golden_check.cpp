// Compares the CSVs of an acceptance run against the checked-in golden files.
// Numeric cells must agree to a relative 1e-6 (absolute 1e-9 near zero);
// text cells must match exactly. Iteration counts are not compared.
//
//   golden_check GOLDEN_DIR RUN_DIR

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

bool number(const std::string& s, double& v) {
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: golden_check GOLDEN_DIR RUN_DIR\n");
    return 2;
  }
  const fs::path golden = argv[1], run = argv[2];
  int files = 0, bad = 0;
  for (const auto& e : fs::directory_iterator(golden)) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    const fs::path other = run / e.path().filename();
    if (!fs::exists(other)) {
      std::printf("%s: missing from run\n", e.path().filename().c_str());
      ++bad;
      continue;
    }
    const auto a = read(e.path()), b = read(other);
    if (a.size() != b.size() || a.empty() || a[0] != b[0]) {
      std::printf("%s: shape or header differs\n", e.path().filename().c_str());
      ++bad;
      continue;
    }
    const auto& header = a[0];
    for (std::size_t r = 1; r < a.size(); ++r) {
      if (a[r].size() != b[r].size()) {
        std::printf("%s row %zu: cell count differs\n", e.path().filename().c_str(), r);
        ++bad;
        continue;
      }
      for (std::size_t c = 0; c < a[r].size(); ++c) {
        if (c < header.size() && header[c] == "iterations") continue;
        double x, y;
        bool ok;
        if (number(a[r][c], x) && number(b[r][c], y))
          ok = std::abs(x - y) <= 1e-6 * std::max(std::abs(x), std::abs(y)) + 1e-9 ||
               (std::isinf(x) && x == y);
        else
          ok = a[r][c] == b[r][c];
        if (!ok) {
          std::printf("%s row %zu col %s: golden %s, run %s\n", e.path().filename().c_str(), r,
                      c < header.size() ? header[c].c_str() : "?", a[r][c].c_str(), b[r][c].c_str());
          ++bad;
        }
      }
    }
  }
  std::printf("%d golden files, %d mismatches\n", files, bad);
  return files > 0 && bad == 0 ? 0 : 1;
}
