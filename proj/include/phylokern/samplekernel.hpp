#ifndef PHYLOKERN_SAMPLEKERNEL_HPP
#define PHYLOKERN_SAMPLEKERNEL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "phylokern/bioio.hpp"
#include "phylokern/seqkernel.hpp"

namespace phylokern::samplekernel {

enum class Transform { Raw, Clr, Log1p, Relative };

std::string transform_name(Transform t);
Transform transform_from_name(const std::string& name);

struct AbundanceMatrix {
  std::vector<std::string> sample_ids;
  std::vector<std::string> otu_ids;
  Eigen::MatrixXd values;  // n x p
  Transform transform_tag = Transform::Raw;
};

// CLR adds the pseudocount first (counts contain zeros), then maps each row
// to log(x_j / geometric mean). log1p is elementwise log(x+1); relative is
// row normalization.
AbundanceMatrix transform(const bioio::OtuTable& table, Transform mode, double pseudocount = 1.0);

enum class KernelKind { StringPhylo, Linear, Rbf, UnifracUnweighted, UnifracWeighted };

std::string kind_name(KernelKind k);

struct KernelMatrix {
  std::vector<std::string> sample_ids;
  Eigen::MatrixXd values;  // n x n, symmetric
  KernelKind kind = KernelKind::Linear;
};

// K = A S A^T. Requires identical OTU ordering between A and S.
KernelMatrix stringphylo_kernel(const AbundanceMatrix& a, const seqkernel::SimilarityMatrix& s);

KernelMatrix linear_kernel(const AbundanceMatrix& a);

// RBF with median-heuristic lengthscale: sigma is the median pairwise
// Euclidean distance (midpoint of the central order statistics when the
// pair count is even). All-identical rows make sigma zero, which is an
// error.
KernelMatrix rbf_median_kernel(const AbundanceMatrix& a);

enum class UnifracMode { Unweighted, Weighted };

// Per-OTU root-path branch lengths in the given order.
Eigen::VectorXd leaf_root_lengths(const bioio::PhyloTree& tree,
                                  const std::vector<std::string>& otu_ids);

// Pairwise UniFrac distances. Unweighted compares presence supports;
// weighted compares relative abundances (the input must carry the Relative
// tag). Empty-vs-empty ratios (0/0) are defined as 0.
Eigen::MatrixXd unifrac_distance(const AbundanceMatrix& a, const Eigen::VectorXd& lengths,
                                 UnifracMode mode);

// K = -1/2 J Delta J with J the centring matrix; Delta is the elementwise
// square of D when square_entries is set. psd_clip zeroes negative
// eigenvalues of the result.
KernelMatrix distance_to_kernel(const Eigen::MatrixXd& dist,
                                const std::vector<std::string>& sample_ids,
                                KernelKind kind, bool square_entries = true,
                                bool psd_clip = true);

struct EigRange {
  double min_eig = 0.0;
  double max_eig = 0.0;
};

EigRange eig_range(const Eigen::MatrixXd& sym);

// Tolerance check used throughout: min eig >= -rel_tol * max(|max eig|, tiny).
bool psd_within_tolerance(const Eigen::MatrixXd& sym, double rel_tol = 1e-8);

}  // namespace phylokern::samplekernel

#endif  // PHYLOKERN_SAMPLEKERNEL_HPP
