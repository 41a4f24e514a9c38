#include "trates/common/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trates/common/error.hpp"

namespace trates {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

void check_field(const std::string& s, const char* what) {
  if (s.find_first_of("\t\n\r") != std::string::npos)
    throw ValidationError(std::string(what) + " contains a tab or newline: " + s);
}

}  // namespace

std::string format_matrix_tsv(const FeatureMatrix& m, const MatrixMeta& meta) {
  std::ostringstream out;
  for (const auto& [k, v] : meta) {
    check_field(k, "meta key");
    check_field(v, "meta value");
    out << "# " << k << '\t' << v << '\n';
  }
  out << "# categories";
  for (const auto& c : m.columns()) out << '\t' << to_string(c.category);
  out << "\nessay_id";
  for (const auto& c : m.columns()) {
    check_field(c.name, "column name");
    out << '\t' << c.name;
  }
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    check_field(m.row_ids()[r], "row id");
    out << m.row_ids()[r];
    for (double v : m.row(r)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
  return out.str();
}

FeatureMatrix parse_matrix_tsv(const std::string& text, MatrixMeta* meta) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> categories;
  std::vector<std::string> header;
  FeatureMatrix m;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header.empty() && line.rfind("# ", 0) == 0) {
      auto f = split_tabs(line.substr(2));
      if (f[0] == "categories") {
        categories.assign(f.begin() + 1, f.end());
      } else if (meta) {
        (*meta)[f[0]] = f.size() > 1 ? f[1] : "";
      }
      continue;
    }
    auto f = split_tabs(line);
    if (header.empty()) {
      if (f.empty() || f[0] != "essay_id") throw ParseError("matrix file: missing essay_id header");
      header = f;
      if (categories.size() != header.size() - 1)
        throw ParseError("matrix file: categories line does not match the header");
      std::vector<ColumnInfo> cols;
      for (std::size_t c = 1; c < header.size(); ++c) {
        auto cat = parse_feature_category(categories[c - 1]);
        if (!cat) throw ParseError("matrix file: unknown category " + categories[c - 1]);
        cols.push_back({header[c], *cat});
      }
      m = FeatureMatrix(std::move(cols));
      continue;
    }
    if (f.size() != header.size())
      throw ParseError("matrix file line " + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size()) + " fields");
    std::vector<double> values(f.size() - 1);
    for (std::size_t c = 1; c < f.size(); ++c) {
      const auto& s = f[c];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), values[c - 1]);
      if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError("matrix file line " + std::to_string(lineno) + ": bad number '" + s + "'");
    }
    m.add_row(f[0], values);
  }
  if (header.empty()) throw ParseError("matrix file: no header");
  return m;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << content;
    if (!out) throw Error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_matrix_tsv(const std::filesystem::path& path, const FeatureMatrix& m,
                      const MatrixMeta& meta) {
  write_file_atomic(path, format_matrix_tsv(m, meta));
}

FeatureMatrix read_matrix_tsv(const std::filesystem::path& path, MatrixMeta* meta) {
  try {
    return parse_matrix_tsv(read_file(path), meta);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace trates
