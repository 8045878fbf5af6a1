#include "phylokern/matrixio.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "phylokern/common.hpp"

namespace phylokern::matrixio {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cells;
}

}  // namespace

std::string to_tsv(const LabeledMatrix& m, const std::string& corner) {
  const Eigen::Index n = m.values.rows();
  std::string out = corner;
  for (const auto& id : m.ids) {
    out += '\t';
    out += id;
  }
  out += '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    out += m.ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      out += '\t';
      out += format_double(m.values(i, j));
    }
    out += '\n';
  }
  return out;
}

LabeledMatrix from_tsv(std::istream& in) {
  LabeledMatrix m;
  std::string line;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_ids;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (!have_header) {
      if (cells.size() < 2) throw ValidationError("matrix tsv: header names no ids");
      m.ids.assign(cells.begin() + 1, cells.end());
      std::unordered_set<std::string> seen(m.ids.begin(), m.ids.end());
      if (seen.size() != m.ids.size()) throw ValidationError("matrix tsv: duplicate ids");
      have_header = true;
      continue;
    }
    if (cells.size() != m.ids.size() + 1)
      throw ValidationError("matrix tsv: ragged row '" + cells[0] + "'");
    row_ids.push_back(cells[0]);
    std::vector<double> row(m.ids.size());
    for (std::size_t j = 1; j < cells.size(); ++j) {
      char* end = nullptr;
      row[j - 1] = std::strtod(cells[j].c_str(), &end);
      if (end != cells[j].c_str() + cells[j].size() || cells[j].empty())
        throw ValidationError("matrix tsv: bad numeric cell '" + cells[j] + "'");
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ValidationError("matrix tsv: empty input");
  if (rows.size() != m.ids.size())
    throw ValidationError("matrix tsv: expected " + std::to_string(m.ids.size()) + " rows, got " +
                          std::to_string(rows.size()));
  if (row_ids != m.ids) throw ValidationError("matrix tsv: row ids do not match header ids");

  const Eigen::Index n = static_cast<Eigen::Index>(m.ids.size());
  m.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_binary(std::ostream& out, const LabeledMatrix& m, std::array<char, 4> magic) {
  out.write(magic.data(), 4);
  const std::uint64_t n = static_cast<std::uint64_t>(m.values.rows());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const auto& id : m.ids) {
    const std::uint32_t len = static_cast<std::uint32_t>(id.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (Eigen::Index i = 0; i < m.values.rows(); ++i)
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      const double v = m.values(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

LabeledMatrix read_binary(std::istream& in, std::array<char, 4> expected_magic) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || magic != expected_magic) throw ValidationError("matrix binary: wrong magic bytes");
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n == 0 || n > (1ull << 32)) throw ValidationError("matrix binary: bad dimension");
  LabeledMatrix m;
  m.ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len > (1u << 20)) throw ValidationError("matrix binary: bad id length");
    std::string id(len, '\0');
    in.read(id.data(), len);
    if (!in) throw ValidationError("matrix binary: truncated id table");
    m.ids.push_back(std::move(id));
  }
  m.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.values.rows(); ++i)
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in) throw ValidationError("matrix binary: truncated payload");
      m.values(i, j) = v;
    }
  return m;
}

void save(const std::string& path, const LabeledMatrix& m, std::array<char, 4> magic,
          const std::string& corner, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  if (binary) {
    write_binary(out, m, magic);
  } else {
    const std::string text = to_tsv(m, corner);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  }
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

LabeledMatrix load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  in.clear();
  in.seekg(0);
  if (magic == kSimilarityMagic) return read_binary(in, kSimilarityMagic);
  if (magic == kKernelMagic) return read_binary(in, kKernelMagic);
  return from_tsv(in);
}

}  // namespace phylokern::matrixio
