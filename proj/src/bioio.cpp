#include "phylokern/bioio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace phylokern::bioio {

namespace {

constexpr const char* kIupac = "ACGTURYSWKMBDHVN";

bool is_iupac(char c) {
  for (const char* p = kIupac; *p; ++p)
    if (*p == c) return true;
  return false;
}

bool is_acgt(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<SequenceRecord> parse_fasta(std::istream& in, ParseMode mode) {
  std::vector<SequenceRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  bool in_record = false;

  auto finish = [&]() {
    if (!in_record) return;
    if (records.back().bases.empty())
      throw ValidationError("fasta: empty sequence for id '" + records.back().id + "'");
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '>') {
      finish();
      std::string header = line.substr(1);
      const std::size_t ws = header.find_first_of(" \t");
      std::string id = (ws == std::string::npos) ? header : header.substr(0, ws);
      if (id.empty()) throw ValidationError("fasta: empty record id");
      if (!seen.insert(id).second)
        throw ValidationError("fasta: duplicate id '" + id + "'");
      records.push_back(SequenceRecord{id, "", false});
      in_record = true;
    } else {
      if (!in_record) throw ValidationError("fasta: sequence data before first header");
      SequenceRecord& rec = records.back();
      for (char raw : line) {
        if (std::isspace(static_cast<unsigned char>(raw))) continue;
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
        if (!is_iupac(c))
          throw ValidationError("fasta: non-IUPAC character '" + std::string(1, raw) +
                                "' in sequence '" + rec.id + "'");
        if (!is_acgt(c)) {
          if (mode == ParseMode::Strict)
            throw ValidationError("fasta: ambiguity code '" + std::string(1, c) +
                                  "' in sequence '" + rec.id + "' (strict mode)");
          rec.has_ambiguity = true;
        }
        rec.bases.push_back(c);
      }
    }
  }
  finish();
  return records;
}

std::vector<SequenceRecord> parse_fasta(const std::string& text, ParseMode mode) {
  std::istringstream in(text);
  return parse_fasta(in, mode);
}

std::string to_fasta(const std::vector<SequenceRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    out += '>';
    out += rec.id;
    out += '\n';
    out += rec.bases;
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Newick

namespace {

class NewickParser {
 public:
  explicit NewickParser(const std::string& text) : text_(strip_comments(text)) {}

  PhyloTree parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ValidationError("newick: empty input");
    PhyloTree tree;
    tree.nodes.emplace_back();  // root
    parse_subtree(tree, 0);
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != ';')
      throw ValidationError("newick: missing terminating ';'");
    ++pos_;
    skip_space();
    if (pos_ != text_.size()) throw ValidationError("newick: trailing characters after ';'");

    std::unordered_set<std::string> seen;
    for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) {
      if (tree.nodes[i].is_leaf()) {
        const std::string& label = tree.nodes[i].label;
        if (label.empty()) throw ValidationError("newick: unlabeled leaf");
        if (!seen.insert(label).second)
          throw ValidationError("newick: duplicate leaf label '" + label + "'");
        tree.leaves.push_back(i);
      }
    }
    if (tree.leaves.empty()) throw ValidationError("newick: tree has no leaves");
    tree.warnings = std::move(warnings_);
    return tree;
  }

 private:
  static std::string strip_comments(const std::string& s) {
    std::string out;
    int depth = 0;
    for (char c : s) {
      if (c == '[') {
        ++depth;
      } else if (c == ']') {
        if (depth == 0) throw ValidationError("newick: unbalanced ']' comment bracket");
        --depth;
      } else if (depth == 0) {
        out.push_back(c);
      }
    }
    if (depth != 0) throw ValidationError("newick: unterminated comment");
    return out;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  // Fills in node `idx` (children or leaf label) and its optional label and
  // branch length.
  void parse_subtree(PhyloTree& tree, int idx) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      for (;;) {
        tree.nodes.emplace_back();
        const int child = static_cast<int>(tree.nodes.size()) - 1;
        tree.nodes[child].parent = idx;
        tree.nodes[idx].children.push_back(child);
        parse_subtree(tree, child);
        skip_space();
        if (pos_ >= text_.size()) throw ValidationError("newick: unbalanced parentheses");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        throw ValidationError("newick: expected ',' or ')'");
      }
      tree.nodes[idx].label = parse_label();
    } else {
      tree.nodes[idx].label = parse_label();
    }
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      tree.nodes[idx].branch_length = parse_number();
      if (tree.nodes[idx].branch_length < 0.0)
        throw ValidationError("newick: negative branch length");
    } else if (idx != 0) {
      warnings_.push_back("newick: missing branch length (defaulting to 0)");
    }
  }

  std::string parse_label() {
    skip_space();
    std::string label;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ':' || c == ',' || c == ')' || c == '(' || c == ';' ||
          std::isspace(static_cast<unsigned char>(c)))
        break;
      label.push_back(c);
      ++pos_;
    }
    return label;
  }

  double parse_number() {
    skip_space();
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ValidationError("newick: expected branch length after ':'");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string text_;
  std::size_t pos_ = 0;
  std::vector<std::string> warnings_;
};

void write_newick_node(const PhyloTree& tree, int idx, std::string& out) {
  const auto& node = tree.nodes[idx];
  if (!node.is_leaf()) {
    out.push_back('(');
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i > 0) out.push_back(',');
      write_newick_node(tree, node.children[i], out);
    }
    out.push_back(')');
  }
  out += node.label;
  if (idx != 0) {
    out.push_back(':');
    out += format_double(node.branch_length);
  }
}

}  // namespace

PhyloTree parse_newick(const std::string& text) { return NewickParser(text).parse(); }

std::string to_newick(const PhyloTree& tree) {
  std::string out;
  write_newick_node(tree, 0, out);
  out.push_back(';');
  return out;
}

std::vector<std::string> PhyloTree::leaf_labels() const {
  std::vector<std::string> labels;
  labels.reserve(leaves.size());
  for (int leaf : leaves) labels.push_back(nodes[leaf].label);
  return labels;
}

int PhyloTree::find_leaf(const std::string& label) const {
  for (int leaf : leaves)
    if (nodes[leaf].label == label) return leaf;
  return -1;
}

double PhyloTree::depth(int node) const {
  double d = 0.0;
  while (node != 0) {
    d += nodes[node].branch_length;
    node = nodes[node].parent;
  }
  return d;
}

// ---------------------------------------------------------------------------
// OTU table

namespace {

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

long long parse_count(const std::string& cell, std::size_t row) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
    throw ValidationError("otu table: cell '" + cell + "' in row " + std::to_string(row) +
                          " is not a non-negative integer");
  if (v < 0)
    throw ValidationError("otu table: negative count in row " + std::to_string(row));
  return v;
}

}  // namespace

OtuTable parse_otu_table(std::istream& in) {
  OtuTable table;
  std::string line;
  bool have_header = false;
  std::unordered_set<std::string> sample_seen;
  std::size_t row = 0;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (!have_header) {
      if (cells.size() < 2) throw ValidationError("otu table: header must name at least one OTU");
      std::unordered_set<std::string> otu_seen;
      for (std::size_t j = 1; j < cells.size(); ++j) {
        if (cells[j].empty()) throw ValidationError("otu table: empty OTU id in header");
        if (!otu_seen.insert(cells[j]).second)
          throw ValidationError("otu table: duplicate OTU id '" + cells[j] + "'");
        table.otu_ids.push_back(cells[j]);
      }
      have_header = true;
      continue;
    }
    ++row;
    if (cells.size() != table.otu_ids.size() + 1)
      throw ValidationError("otu table: row " + std::to_string(row) + " has " +
                            std::to_string(cells.size() - 1) + " cells, expected " +
                            std::to_string(table.otu_ids.size()));
    if (cells[0].empty()) throw ValidationError("otu table: empty sample id");
    if (!sample_seen.insert(cells[0]).second)
      throw ValidationError("otu table: duplicate sample id '" + cells[0] + "'");
    table.sample_ids.push_back(cells[0]);
    std::vector<long long> counts(table.otu_ids.size());
    for (std::size_t j = 1; j < cells.size(); ++j) counts[j - 1] = parse_count(cells[j], row);
    table.counts.push_back(std::move(counts));
  }
  if (!have_header) throw ValidationError("otu table: empty input");
  if (table.sample_ids.empty()) throw ValidationError("otu table: no sample rows");
  return table;
}

OtuTable parse_otu_table(const std::string& text) {
  std::istringstream in(text);
  return parse_otu_table(in);
}

std::string to_tsv(const OtuTable& table) {
  std::string out = "sample";
  for (const auto& id : table.otu_ids) {
    out += '\t';
    out += id;
  }
  out += '\n';
  for (std::size_t i = 0; i < table.n_samples(); ++i) {
    out += table.sample_ids[i];
    for (long long c : table.counts[i]) {
      out += '\t';
      out += std::to_string(c);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cophenetic distances

CopheneticMatrix cophenetic(const PhyloTree& tree, const std::vector<std::string>& otu_ids) {
  const std::size_t p = otu_ids.size();
  std::unordered_map<std::string, int> want;
  want.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    if (!want.emplace(otu_ids[i], static_cast<int>(i)).second)
      throw ValidationError("cophenetic: duplicate OTU id '" + otu_ids[i] + "'");
  }
  for (const auto& id : otu_ids)
    if (tree.find_leaf(id) < 0)
      throw ValidationError("cophenetic: OTU '" + id + "' is not a leaf of the tree");

  CopheneticMatrix out;
  out.otu_ids = otu_ids;
  out.dist = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));

  // Node depths (root-path lengths), then pair distances accumulated at the
  // lowest common ancestor: d(i,j) = depth_i + depth_j - 2 * depth_lca.
  const std::size_t n_nodes = tree.nodes.size();
  std::vector<double> node_depth(n_nodes, 0.0);
  std::vector<int> order;  // topological, parents first
  order.reserve(n_nodes);
  order.push_back(0);
  for (std::size_t h = 0; h < order.size(); ++h) {
    const int v = order[h];
    for (int c : tree.nodes[v].children) {
      node_depth[c] = node_depth[v] + tree.nodes[c].branch_length;
      order.push_back(c);
    }
  }

  std::vector<double> leaf_depth(p, 0.0);
  for (int leaf : tree.leaves) {
    const auto hit = want.find(tree.nodes[leaf].label);
    if (hit != want.end()) leaf_depth[static_cast<std::size_t>(hit->second)] = node_depth[leaf];
  }

  // Wanted leaves below each node, filled leaves-up. Pairs drawn from
  // different children of v have their LCA at v.
  std::vector<std::vector<int>> below(n_nodes);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    const auto& node = tree.nodes[v];
    if (node.is_leaf()) {
      const auto hit = want.find(node.label);
      if (hit != want.end()) below[v].push_back(hit->second);
      continue;
    }
    std::vector<int>& mine = below[v];
    for (int c : node.children) {
      for (int i : mine) {
        for (int j : below[c]) {
          const double d = leaf_depth[i] + leaf_depth[j] - 2.0 * node_depth[v];
          out.dist(i, j) = d;
          out.dist(j, i) = d;
        }
      }
      mine.insert(mine.end(), below[c].begin(), below[c].end());
    }
  }

  out.max_dist = out.dist.maxCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// Dataset alignment

AlignedDataset align_dataset(std::vector<SequenceRecord> seqs, PhyloTree tree,
                             OtuTable table, ParseMode mode) {
  std::unordered_set<std::string> tree_ids;
  for (int leaf : tree.leaves) tree_ids.insert(tree.nodes[leaf].label);
  std::unordered_map<std::string, std::size_t> table_col;
  for (std::size_t j = 0; j < table.otu_ids.size(); ++j) table_col[table.otu_ids[j]] = j;

  AlignedDataset out;
  std::unordered_set<std::string> fasta_ids;

  // Canonical order is the FASTA file order, filtered (lenient) or checked
  // (strict) against the other two components.
  for (const auto& rec : seqs) {
    fasta_ids.insert(rec.id);
    const bool in_tree = tree_ids.count(rec.id) > 0;
    const bool in_table = table_col.count(rec.id) > 0;
    if (in_tree && in_table) {
      out.otu_ids.push_back(rec.id);
      out.seqs.push_back(rec);
      continue;
    }
    const std::string missing_from = !in_tree ? "tree" : "count table";
    if (mode == ParseMode::Strict)
      throw ValidationError("align: OTU '" + rec.id + "' missing from " + missing_from);
    out.warnings.push_back("align: dropping OTU '" + rec.id + "' (missing from " +
                           missing_from + ")");
  }
  if (mode == ParseMode::Strict) {
    for (const auto& id : tree_ids)
      if (!fasta_ids.count(id))
        throw ValidationError("align: tree leaf '" + id + "' missing from sequences");
    for (const auto& id : table.otu_ids)
      if (!fasta_ids.count(id))
        throw ValidationError("align: table OTU '" + id + "' missing from sequences");
  } else {
    for (const auto& id : tree_ids)
      if (!fasta_ids.count(id))
        out.warnings.push_back("align: tree leaf '" + id + "' has no sequence (ignored)");
    for (const auto& id : table.otu_ids)
      if (!fasta_ids.count(id))
        out.warnings.push_back("align: table OTU '" + id + "' has no sequence (dropped)");
  }
  if (out.otu_ids.empty()) throw ValidationError("align: no OTUs shared by all components");

  OtuTable aligned;
  aligned.sample_ids = table.sample_ids;
  aligned.otu_ids = out.otu_ids;
  aligned.counts.reserve(table.n_samples());
  for (const auto& row : table.counts) {
    std::vector<long long> cells(out.otu_ids.size());
    for (std::size_t j = 0; j < out.otu_ids.size(); ++j)
      cells[j] = row[table_col.at(out.otu_ids[j])];
    aligned.counts.push_back(std::move(cells));
  }
  out.table = std::move(aligned);
  out.tree = std::move(tree);
  return out;
}

}  // namespace phylokern::bioio
