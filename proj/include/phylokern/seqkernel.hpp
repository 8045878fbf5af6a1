#ifndef PHYLOKERN_SEQKERNEL_HPP
#define PHYLOKERN_SEQKERNEL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "phylokern/bioio.hpp"
#include "phylokern/common.hpp"

namespace phylokern::seqkernel {

enum class Variant { Spectrum, Mismatch, GappyPair };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct KmerConfig {
  Variant variant = Variant::Spectrum;
  int k = 1;
  int m = 0;  // Mismatch: allowed mismatches, 1 <= m <= k-1
  int g = 0;  // GappyPair: maximum gap length, g >= 0

  void validate() const;
  std::string describe() const;
};

// OTU-wise similarity matrix of exact co-occurrence counts.
struct SimilarityMatrix {
  std::vector<std::string> otu_ids;
  Eigen::MatrixXd values;  // p x p, symmetric
  KmerConfig config;
  bool normalized = false;
};

// Exact inner product of the variant's k-mer feature maps. Sequences
// shorter than the window contribute zero features; windows containing a
// non-ACGT symbol match nothing.
double kernel_entry(const bioio::SequenceRecord& z, const bioio::SequenceRecord& z_other,
                    const KmerConfig& cfg);

struct BuildOptions {
  int threads = 0;         // 0 = resolve from env / hardware
  bool normalize = false;  // cosine-normalize entries by the diagonal
};

// Assembles S over all sequence pairs using per-sequence sparse feature
// indexes (sorted k-mer profiles; mismatch uses a pruned trie
// co-traversal). Entries are computed independently and in parallel.
SimilarityMatrix build_similarity_matrix(const std::vector<bioio::SequenceRecord>& seqs,
                                         const KmerConfig& cfg, const BuildOptions& opts = {});

// Test oracle: materializes the dense feature vector over the full index
// set and takes the dot product. Guarded to small feature spaces
// (4^k <= 1e6 for Spectrum/Mismatch, (g+1)*4^(2k) <= 1e7 for GappyPair).
double brute_force_entry(const bioio::SequenceRecord& z, const bioio::SequenceRecord& z_other,
                         const KmerConfig& cfg);

}  // namespace phylokern::seqkernel

#endif  // PHYLOKERN_SEQKERNEL_HPP
