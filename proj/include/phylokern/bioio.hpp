#ifndef PHYLOKERN_BIOIO_HPP
#define PHYLOKERN_BIOIO_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "phylokern/common.hpp"

namespace phylokern::bioio {

enum class ParseMode { Strict, Lenient };

struct SequenceRecord {
  std::string id;
  std::string bases;           // uppercased on parse
  bool has_ambiguity = false;  // lenient mode only: IUPAC codes beyond ACGT
};

// FASTA ingestion. Records come back in file order, multi-line sequences
// concatenated, bases uppercased. The record id is the header text up to
// the first whitespace. Strict mode rejects anything outside {A,C,G,T};
// lenient mode keeps IUPAC ambiguity codes and flags the record.
std::vector<SequenceRecord> parse_fasta(std::istream& in, ParseMode mode);
std::vector<SequenceRecord> parse_fasta(const std::string& text, ParseMode mode);
std::string to_fasta(const std::vector<SequenceRecord>& records);

struct PhyloTree {
  struct Node {
    int parent = -1;
    double branch_length = 0.0;  // length of the edge to the parent; 0 at root
    std::string label;           // leaf label, or optional internal label
    std::vector<int> children;
    bool is_leaf() const { return children.empty(); }
  };

  std::vector<Node> nodes;  // nodes[0] is the root
  std::vector<int> leaves;  // leaf node indices in parse order
  std::vector<std::string> warnings;

  std::size_t n_leaves() const { return leaves.size(); }
  std::vector<std::string> leaf_labels() const;
  // Index of the leaf with this label, or -1.
  int find_leaf(const std::string& label) const;
  // Sum of branch lengths from the node up to the root.
  double depth(int node) const;
};

// Standard Newick with branch lengths, ';'-terminated. Comments in
// [brackets] are stripped; unlabeled internal nodes are allowed; a missing
// branch length defaults to 0 with a warning.
PhyloTree parse_newick(const std::string& text);
std::string to_newick(const PhyloTree& tree);

struct OtuTable {
  std::vector<std::string> sample_ids;
  std::vector<std::string> otu_ids;
  std::vector<std::vector<long long>> counts;  // n_samples x n_otus

  std::size_t n_samples() const { return sample_ids.size(); }
  std::size_t n_otus() const { return otu_ids.size(); }
};

// TSV count table: header row of OTU ids (first cell names the sample
// column), one row per sample, non-negative integer cells. Accepts Unix or
// Windows newlines.
OtuTable parse_otu_table(std::istream& in);
OtuTable parse_otu_table(const std::string& text);
std::string to_tsv(const OtuTable& table);

struct CopheneticMatrix {
  std::vector<std::string> otu_ids;
  Eigen::MatrixXd dist;  // p x p, symmetric, zero diagonal
  double max_dist = 0.0;
};

// Pairwise path-length distances between the named leaves, aligned to the
// otu_ids order.
CopheneticMatrix cophenetic(const PhyloTree& tree, const std::vector<std::string>& otu_ids);

struct AlignedDataset {
  std::vector<SequenceRecord> seqs;
  PhyloTree tree;
  OtuTable table;
  std::vector<std::string> otu_ids;  // canonical order (FASTA order)
  std::vector<std::string> warnings;
};

// Reconciles the three components onto one canonical OTU ordering (the
// FASTA file order). Strict mode requires the id sets to match exactly;
// lenient mode intersects and drops extras with warnings.
AlignedDataset align_dataset(std::vector<SequenceRecord> seqs, PhyloTree tree,
                             OtuTable table, ParseMode mode);

}  // namespace phylokern::bioio

#endif  // PHYLOKERN_BIOIO_HPP
